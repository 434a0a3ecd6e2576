#pragma once

#include "dirac/fields.hpp"

namespace dirac {

// Discrete transforms matching the analytic convention F f (k) = integral of
// e^{+ik.x} f(x) dx. The raw forward transform is the unscaled lattice sum
// sum_x e^{+ik.x} f(x); the inverse applies 1/n^3. Physical integrals carry
// the extra h^3, applied at the call sites that need it.
//
// fft3 transforms one contiguous n^3 component in place.
void fft3_forward(std::vector<cplx>& data, const GridSpec& grid, std::size_t offset = 0);
void fft3_inverse(std::vector<cplx>& data, const GridSpec& grid, std::size_t offset = 0);

SpectralField8 fft_forward(const RealField8& f);

// Inverse transform of an 8-component spectrum that is expected to describe
// a real field; the imaginary residue is discarded and its maximum modulus
// reported through *imag_residue when non-null.
RealField8 fft_inverse(const SpectralField8& f, double* imag_residue = nullptr);

// Complex 4-spinor transforms (used by the cross-check evolution route).
std::vector<cplx> fft_forward_spinor(const SpinorField& psi);
SpinorField fft_inverse_spinor(std::vector<cplx> spectrum, const GridSpec& grid);

}  // namespace dirac
