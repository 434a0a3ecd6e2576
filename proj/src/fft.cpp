#include "dirac/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace dirac {

namespace {

// One pair of FFTW plans per grid size. Plans are created once with
// FFTW_ESTIMATE (deterministic algorithm choice) and FFTW_UNALIGNED so they
// can run on any caller buffer via fftw_execute_dft.
struct PlanPair {
    fftw_plan fwd = nullptr;  // e^{+ikx} accumulation (FFTW sign +1)
    fftw_plan inv = nullptr;  // e^{-ikx} accumulation (FFTW sign -1)
};

std::mutex plan_mutex;
std::map<int, PlanPair> plan_cache;

PlanPair& plans_for(int n)
{
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plan_cache.find(n);
    if (it != plan_cache.end()) return it->second;

    std::vector<cplx> scratch(std::size_t(n) * n * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.inv = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!pp.fwd || !pp.inv) throw std::runtime_error("fft: plan creation failed");
    return plan_cache.emplace(n, pp).first->second;
}

void execute(fftw_plan plan, cplx* data)
{
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void fft3_forward(std::vector<cplx>& data, const GridSpec& grid, std::size_t offset)
{
    execute(plans_for(grid.n).fwd, data.data() + offset);
}

void fft3_inverse(std::vector<cplx>& data, const GridSpec& grid, std::size_t offset)
{
    execute(plans_for(grid.n).inv, data.data() + offset);
    const double scale = 1.0 / double(grid.size());
    cplx* p = data.data() + offset;
    for (std::size_t i = 0, sz = grid.size(); i < sz; ++i) p[i] *= scale;
}

SpectralField8 fft_forward(const RealField8& f)
{
    SpectralField8 out(f.grid);
    const std::size_t sz = f.grid.size();
    for (int c = 0; c < 8; ++c) {
        for (std::size_t i = 0; i < sz; ++i) out.data[c * sz + i] = cplx(f.data[c * sz + i], 0.0);
        fft3_forward(out.data, f.grid, c * sz);
    }
    return out;
}

RealField8 fft_inverse(const SpectralField8& f, double* imag_residue)
{
    std::vector<cplx> work = f.data;
    const std::size_t sz = f.grid.size();
    RealField8 out(f.grid);
    double res = 0.0;
    for (int c = 0; c < 8; ++c) {
        fft3_inverse(work, f.grid, c * sz);
        for (std::size_t i = 0; i < sz; ++i) {
            out.data[c * sz + i] = work[c * sz + i].real();
            double im = std::abs(work[c * sz + i].imag());
            if (im > res) res = im;
        }
    }
    if (imag_residue) *imag_residue = res;
    return out;
}

std::vector<cplx> fft_forward_spinor(const SpinorField& psi)
{
    std::vector<cplx> out = psi.data;
    const std::size_t sz = psi.grid.size();
    for (int c = 0; c < 4; ++c) fft3_forward(out, psi.grid, c * sz);
    return out;
}

SpinorField fft_inverse_spinor(std::vector<cplx> spectrum, const GridSpec& grid)
{
    SpinorField out(grid);
    const std::size_t sz = grid.size();
    for (int c = 0; c < 4; ++c) fft3_inverse(spectrum, grid, c * sz);
    out.data = std::move(spectrum);
    return out;
}

}  // namespace dirac
