#pragma once

#include <string>
#include <vector>

#include "dirac/grid.hpp"
#include "dirac/linalg.hpp"

namespace dirac {

// Complex 4-component state on the grid, component-major storage:
// data[c * grid.size() + node].
struct SpinorField {
    GridSpec grid;
    std::vector<cplx> data;

    // Smallest radius known to contain the support, if any (used by the
    // no-wraparound bookkeeping); negative means unknown.
    double support_radius_hint = -1.0;
    // Set by evolve() when a requested evolution ran past the torus budget.
    bool wrap_flagged = false;

    SpinorField() = default;
    explicit SpinorField(const GridSpec& g) : grid(g), data(4 * g.size(), cplx(0, 0)) {}

    cplx& at(int c, std::size_t node) { return data[std::size_t(c) * grid.size() + node]; }
    const cplx& at(int c, std::size_t node) const { return data[std::size_t(c) * grid.size() + node]; }
};

// The same state viewed as 8 real components (Re psi_1..4, Im psi_1..4).
struct RealField8 {
    GridSpec grid;
    std::vector<double> data;

    double support_radius_hint = -1.0;
    bool wrap_flagged = false;

    RealField8() = default;
    explicit RealField8(const GridSpec& g) : grid(g), data(8 * g.size(), 0.0) {}

    double& at(int c, std::size_t node) { return data[std::size_t(c) * grid.size() + node]; }
    const double& at(int c, std::size_t node) const { return data[std::size_t(c) * grid.size() + node]; }
};

// Spectral counterpart of RealField8: 8 complex components over the k-grid,
// raw-DFT normalization (see fft.hpp).
struct SpectralField8 {
    GridSpec grid;
    std::vector<cplx> data;

    SpectralField8() = default;
    explicit SpectralField8(const GridSpec& g) : grid(g), data(8 * g.size(), cplx(0, 0)) {}

    cplx& at(int c, std::size_t node) { return data[std::size_t(c) * grid.size() + node]; }
    const cplx& at(int c, std::size_t node) const { return data[std::size_t(c) * grid.size() + node]; }
};

// Compactly supported real test function; vanishing outside |x| <= radius
// is enforced at construction.
struct TestFunction {
    RealField8 field;
    double radius = 0.0;
};

RealField8 realify(const SpinorField& psi);
SpinorField complexify(const RealField8& f);

// h^3 sum_x |psi(x)|^2
double charge(const SpinorField& psi);
double charge(const RealField8& f);

// <psi, phi> = h^3 sum_x sum_j R^j psi(x) R^j phi(x). Throws on grid mismatch.
double inner(const RealField8& a, const RealField8& b);

// (h^3 sum_{|x|<R} |psi(x)|^2)^{1/2}; requires R < L/2 so the ball does not wrap.
double local_seminorm(const SpinorField& psi, double R);
double local_seminorm(const RealField8& f, double R);

// Smallest R such that every node with |x| > R has |psi(x)| < amplitude_floor.
double support_radius(const SpinorField& psi, double amplitude_floor);
double support_radius(const RealField8& f, double amplitude_floor);

// Pointwise 8-vector Euclidean norm maximum.
double sup_norm(const RealField8& f);

// --- Test-function families -------------------------------------------------

// Smooth radial profiles sampled on the grid, placed on one spinor
// component (0..7 in the real view) or spread over all of them.
enum class BumpKind {
    point,          // single node at the origin
    smooth,         // C-infinity bump exp(1 - 1/(1 - (r/R)^2))
    gauss_taper,    // Gaussian of width sigma, smoothly cut off at R
};

struct BumpSpec {
    BumpKind kind = BumpKind::smooth;
    double radius = 4.0;
    double sigma = 2.2;     // gauss_taper only
    int component = 0;      // 0..7, or -1 for all eight
    double amplitude = 1.0;
};

TestFunction make_bump(const GridSpec& grid, const BumpSpec& spec);

// --- Binary dump format -------------------------------------------------
// Header: magic "DRC1", u32 endian tag 0x01020304, u32 n, f64 L,
// u32 component count, u8 kind (0 = real components, 1 = complex),
// then the raw component-major payload as little-endian 64-bit floats.
void dump_field(const RealField8& f, const std::string& path);
void dump_field(const SpinorField& f, const std::string& path);
RealField8 load_real_field(const std::string& path);

}  // namespace dirac
