#include "dirac/fields.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dirac {

RealField8 realify(const SpinorField& psi)
{
    RealField8 out(psi.grid);
    const std::size_t sz = psi.grid.size();
    for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < sz; ++i) {
            out.data[c * sz + i] = psi.data[c * sz + i].real();
            out.data[(c + 4) * sz + i] = psi.data[c * sz + i].imag();
        }
    out.support_radius_hint = psi.support_radius_hint;
    out.wrap_flagged = psi.wrap_flagged;
    return out;
}

SpinorField complexify(const RealField8& f)
{
    SpinorField out(f.grid);
    const std::size_t sz = f.grid.size();
    for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < sz; ++i)
            out.data[c * sz + i] = cplx(f.data[c * sz + i], f.data[(c + 4) * sz + i]);
    out.support_radius_hint = f.support_radius_hint;
    out.wrap_flagged = f.wrap_flagged;
    return out;
}

double charge(const SpinorField& psi)
{
    double acc = 0.0;
    for (const cplx& v : psi.data) acc += std::norm(v);
    return acc * psi.grid.h() * psi.grid.h() * psi.grid.h();
}

double charge(const RealField8& f)
{
    double acc = 0.0;
    for (double v : f.data) acc += v * v;
    return acc * f.grid.h() * f.grid.h() * f.grid.h();
}

double inner(const RealField8& a, const RealField8& b)
{
    if (!(a.grid == b.grid))
        throw std::invalid_argument("inner: grid mismatch");
    double acc = 0.0;
    const std::size_t total = a.data.size();
    for (std::size_t i = 0; i < total; ++i) acc += a.data[i] * b.data[i];
    return acc * a.grid.h() * a.grid.h() * a.grid.h();
}

namespace {

template <typename Field, typename NormSq>
double seminorm_impl(const Field& f, double R, NormSq node_norm_sq)
{
    const GridSpec& g = f.grid;
    if (!(R < 0.5 * g.length))
        throw std::invalid_argument("local_seminorm: R must be < L/2 (ball would wrap)");
    double acc = 0.0;
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix)
                if (g.node_radius(ix, iy, iz) < R) acc += node_norm_sq(g.linear(ix, iy, iz));
    return std::sqrt(acc * g.h() * g.h() * g.h());
}

template <typename Field, typename NormSq>
double support_radius_impl(const Field& f, double floor, NormSq node_norm_sq)
{
    const GridSpec& g = f.grid;
    double f2 = floor * floor;
    if (floor > 0.0 && f2 == 0.0) f2 = std::numeric_limits<double>::denorm_min();
    double r = 0.0;
    bool any = false;
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix)
                if (node_norm_sq(g.linear(ix, iy, iz)) >= f2) {
                    any = true;
                    double rad = g.node_radius(ix, iy, iz);
                    if (rad > r) r = rad;
                }
    return any ? r : 0.0;
}

}  // namespace

double local_seminorm(const SpinorField& psi, double R)
{
    const std::size_t sz = psi.grid.size();
    return seminorm_impl(psi, R, [&](std::size_t i) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) s += std::norm(psi.data[c * sz + i]);
        return s;
    });
}

double local_seminorm(const RealField8& f, double R)
{
    const std::size_t sz = f.grid.size();
    return seminorm_impl(f, R, [&](std::size_t i) {
        double s = 0.0;
        for (int c = 0; c < 8; ++c) s += f.data[c * sz + i] * f.data[c * sz + i];
        return s;
    });
}

double support_radius(const SpinorField& psi, double amplitude_floor)
{
    const std::size_t sz = psi.grid.size();
    return support_radius_impl(psi, amplitude_floor, [&](std::size_t i) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) s += std::norm(psi.data[c * sz + i]);
        return s;
    });
}

double support_radius(const RealField8& f, double amplitude_floor)
{
    const std::size_t sz = f.grid.size();
    return support_radius_impl(f, amplitude_floor, [&](std::size_t i) {
        double s = 0.0;
        for (int c = 0; c < 8; ++c) s += f.data[c * sz + i] * f.data[c * sz + i];
        return s;
    });
}

double sup_norm(const RealField8& f)
{
    const std::size_t sz = f.grid.size();
    double best = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
        double s = 0.0;
        for (int c = 0; c < 8; ++c) s += f.data[c * sz + i] * f.data[c * sz + i];
        if (s > best) best = s;
    }
    return std::sqrt(best);
}

TestFunction make_bump(const GridSpec& grid, const BumpSpec& spec)
{
    if (!(spec.radius > 0.0))
        throw std::invalid_argument("make_bump: radius must be positive");
    if (spec.radius >= 0.5 * grid.length)
        throw std::invalid_argument("make_bump: radius must be < L/2");
    if (spec.component < -1 || spec.component > 7)
        throw std::invalid_argument("make_bump: component out of range");

    TestFunction tf;
    tf.field = RealField8(grid);
    tf.radius = spec.radius;

    auto profile = [&](double r) -> double {
        if (r >= spec.radius) return 0.0;
        switch (spec.kind) {
            case BumpKind::point:
                return r == 0.0 ? 1.0 : 0.0;
            case BumpKind::smooth: {
                double u = r / spec.radius;
                return std::exp(1.0 - 1.0 / (1.0 - u * u));
            }
            case BumpKind::gauss_taper: {
                double u = r / spec.radius;
                double taper = std::exp(1.0 - 1.0 / (1.0 - u * u));
                // taper^(1/8) keeps the Gaussian shape except near the edge
                double cut = std::pow(taper, 0.125);
                return std::exp(-0.5 * r * r / (spec.sigma * spec.sigma)) * cut;
            }
        }
        return 0.0;
    };

    const std::size_t sz = grid.size();
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                double p = spec.amplitude * profile(grid.node_radius(ix, iy, iz));
                if (p == 0.0) continue;
                std::size_t node = grid.linear(ix, iy, iz);
                if (spec.component >= 0)
                    tf.field.data[std::size_t(spec.component) * sz + node] = p;
                else
                    for (int c = 0; c < 8; ++c) tf.field.data[std::size_t(c) * sz + node] = p;
            }
    tf.field.support_radius_hint = spec.radius;
    return tf;
}

namespace {

constexpr char kMagic[4] = {'D', 'R', 'C', '1'};
constexpr std::uint32_t kEndianTag = 0x01020304u;

void write_header(std::ofstream& os, const GridSpec& g, std::uint32_t comps, std::uint8_t kind)
{
    os.write(kMagic, 4);
    std::uint32_t tag = kEndianTag, n = std::uint32_t(g.n);
    double L = g.length;
    os.write(reinterpret_cast<const char*>(&tag), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&L), 8);
    os.write(reinterpret_cast<const char*>(&comps), 4);
    os.write(reinterpret_cast<const char*>(&kind), 1);
}

}  // namespace

void dump_field(const RealField8& f, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_field: cannot open " + path);
    write_header(os, f.grid, 8, 0);
    os.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * 8));
    if (!os) throw std::runtime_error("dump_field: write failed for " + path);
}

void dump_field(const SpinorField& f, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_field: cannot open " + path);
    write_header(os, f.grid, 4, 1);
    os.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * 16));
    if (!os) throw std::runtime_error("dump_field: write failed for " + path);
}

RealField8 load_real_field(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_real_field: cannot open " + path);
    char magic[4];
    std::uint32_t tag = 0, n = 0, comps = 0;
    double L = 0;
    std::uint8_t kind = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&tag), 4);
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&comps), 4);
    is.read(reinterpret_cast<char*>(&kind), 1);
    if (!is || std::memcmp(magic, kMagic, 4) != 0 || tag != kEndianTag)
        throw std::runtime_error("load_real_field: bad header in " + path);
    if (comps != 8 || kind != 0)
        throw std::runtime_error("load_real_field: not an 8-component real dump");
    RealField8 f(GridSpec(int(n), L));
    is.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(f.data.size() * 8));
    if (!is) throw std::runtime_error("load_real_field: truncated payload in " + path);
    return f;
}

}  // namespace dirac
