#include "dirac/samplers.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dirac/fft.hpp"
#include "dirac/rng.hpp"

namespace dirac {

CovarianceSymbol identity_symbol(double scale)
{
    CovarianceSymbol s;
    s.diagonal = true;
    s.eval_diag = [scale](const Vec3&) { return Vec8d(Vec8d::Constant(scale)); };
    s.eval = [scale](const Vec3&) { return Mat8c(scale * Mat8c::Identity()); };
    s.corr_range = 0.0;
    return s;
}

CovarianceSymbol gaussian_bump_symbol(double kappa, double scale)
{
    return gaussian_bump_symbol(kappa, Vec8d(Vec8d::Constant(scale)));
}

CovarianceSymbol gaussian_bump_symbol(double kappa, const Vec8d& weights)
{
    if (!(kappa > 0.0)) throw std::invalid_argument("gaussian_bump_symbol: kappa must be positive");
    CovarianceSymbol s;
    s.diagonal = true;
    s.eval_diag = [kappa, weights](const Vec3& k) {
        double g = std::exp(-0.5 * k.squaredNorm() / (kappa * kappa));
        return Vec8d(g * weights);
    };
    s.eval = [kappa, weights](const Vec3& k) {
        double g = std::exp(-0.5 * k.squaredNorm() / (kappa * kappa));
        return Mat8c((g * weights).asDiagonal());
    };
    // position-space correlation decays like exp(-kappa^2 z^2 / 2)
    s.corr_range = 6.5 / kappa;
    return s;
}

double mean_charge_density(const CovarianceSymbol& sym, const GridSpec& grid)
{
    double acc = 0.0;
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                Vec3 k = grid.wavevector(ix, iy, iz);
                if (sym.diagonal)
                    acc += sym.eval_diag(k).sum();
                else
                    acc += sym.eval(k).trace().real();
            }
    double L3 = grid.length * grid.length * grid.length;
    return acc / L3;
}

double min_symbol_eigenvalue(const CovarianceSymbol& sym, const GridSpec& grid, Vec3* argmin_k)
{
    double best = std::numeric_limits<double>::infinity();
    Vec3 where = Vec3::Zero();
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                Vec3 k = grid.wavevector(ix, iy, iz);
                double ev = sym.diagonal ? sym.eval_diag(k).minCoeff()
                                         : min_eigenvalue(sym.eval(k));
                if (ev < best) {
                    best = ev;
                    where = k;
                }
            }
    if (argmin_k) *argmin_k = where;
    return best;
}

namespace {

double kernel_profile(double r, double radius)
{
    if (r >= radius) return 0.0;
    double u = r / radius;
    double w = 1.0 - u * u;
    return w * w;  // C^1 at the boundary
}

}  // namespace

Sampler::Sampler(const SamplerSpec& spec) : spec_(spec)
{
    const GridSpec& g = spec_.grid;
    if (spec_.kind == SamplerKind::gaussian_spectral) {
        switch (spec_.family) {
            case SymbolFamily::identity:
                symbol_ = identity_symbol(spec_.scale);
                break;
            case SymbolFamily::gaussian_bump:
                symbol_ = gaussian_bump_symbol(spec_.kappa, Vec8d(spec_.scale * spec_.weights));
                break;
        }
        return;
    }

    // moving average: precompute the kernel and its raw spectrum
    if (!(spec_.kernel_radius >= 0.0))
        throw std::invalid_argument("Sampler: kernel radius must be nonnegative");
    if (spec_.kernel_radius > 0.25 * g.length)
        throw std::invalid_argument(
            "Sampler: kernel support exceeds L/4, breaking the no-wraparound budget");

    double norm2 = 0.0;
    std::vector<cplx> kern(g.size(), cplx(0, 0));
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                double p = spec_.kernel_radius == 0.0
                               ? (ix == 0 && iy == 0 && iz == 0 ? 1.0 : 0.0)
                               : kernel_profile(g.node_radius(ix, iy, iz), spec_.kernel_radius);
                kern[g.linear(ix, iy, iz)] = p;
                norm2 += p * p;
            }
    kernel_amp_ = spec_.kernel_amplitude > 0.0 ? spec_.kernel_amplitude
                                               : 1.0 / std::sqrt(norm2);
    for (auto& v : kern) v *= kernel_amp_;

    fft3_forward(kern, g);
    kernel_spectrum_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) kernel_spectrum_[i] = kern[i].real();
}

RealField8 Sampler::sample(std::uint64_t index) const
{
    return spec_.kind == SamplerKind::gaussian_spectral ? sample_gaussian(index)
                                                        : sample_moving_average(index);
}

RealField8 Sampler::sample_gaussian(std::uint64_t index) const
{
    const GridSpec& g = spec_.grid;
    const std::size_t sz = g.size();
    Xoshiro256pp rng(derive_stream_seed(spec_.seed, index));

    SpectralField8 spec_field(g);
    const double L3 = g.length * g.length * g.length;
    // raw spectral coefficient = (n^3 / L^{3/2}) q^{1/2}(k) w, so that the
    // inverse transform has covariance q0(x - y)
    const double amp = double(sz) / std::sqrt(L3);
    const double inv_sqrt2 = 0.7071067811865475244;

    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                const std::size_t self = g.linear(ix, iy, iz);
                const int px = (g.n - ix) % g.n, py = (g.n - iy) % g.n, pz = (g.n - iz) % g.n;
                const std::size_t partner = g.linear(px, py, pz);
                if (partner < self) continue;  // filled when we met the partner

                const Vec3 k = g.wavevector(ix, iy, iz);
                Vec8c w;
                if (partner == self) {
                    for (int c = 0; c < 8; ++c) w[c] = cplx(rng.normal(), 0.0);
                } else {
                    for (int c = 0; c < 8; ++c)
                        w[c] = cplx(rng.normal(), rng.normal()) * inv_sqrt2;
                }

                Vec8c coeff;
                if (symbol_.diagonal) {
                    Vec8d d = symbol_.eval_diag(k);
                    for (int c = 0; c < 8; ++c) {
                        if (d[c] < -1e-12) {
                            std::ostringstream os;
                            os << "sample_gaussian: symbol not PSD at k = (" << k[0] << ", "
                               << k[1] << ", " << k[2] << "), eigenvalue " << d[c];
                            throw std::runtime_error(os.str());
                        }
                        coeff[c] = std::sqrt(std::max(d[c], 0.0)) * w[c];
                    }
                } else {
                    Mat8c root;
                    try {
                        root = psd_sqrt(symbol_.eval(k));
                    } catch (const std::exception& e) {
                        std::ostringstream os;
                        os << "sample_gaussian: symbol not PSD at k = (" << k[0] << ", " << k[1]
                           << ", " << k[2] << "): " << e.what();
                        throw std::runtime_error(os.str());
                    }
                    coeff = root * w;
                }
                coeff *= amp;
                for (int c = 0; c < 8; ++c) {
                    spec_field.data[c * sz + self] = coeff[c];
                    if (partner != self)
                        spec_field.data[c * sz + partner] = std::conj(coeff[c]);
                }
            }
    return fft_inverse(spec_field);
}

RealField8 Sampler::sample_moving_average(std::uint64_t index) const
{
    const GridSpec& g = spec_.grid;
    const std::size_t sz = g.size();
    Xoshiro256pp rng(derive_stream_seed(spec_.seed, index));

    // canonical draw order: component-major sign field
    std::vector<double> xi(8 * sz);
    for (auto& v : xi) v = rng.sign();

    RealField8 out(g);
    std::vector<cplx> pack(sz);
    for (int p = 0; p < 4; ++p) {
        const double* re = &xi[std::size_t(2 * p) * sz];
        const double* im = &xi[std::size_t(2 * p + 1) * sz];
        for (std::size_t i = 0; i < sz; ++i) pack[i] = cplx(re[i], im[i]);
        fft3_forward(pack, g);
        for (std::size_t i = 0; i < sz; ++i) pack[i] *= kernel_spectrum_[i];
        fft3_inverse(pack, g);
        double* oa = &out.data[std::size_t(2 * p) * sz];
        double* ob = &out.data[std::size_t(2 * p + 1) * sz];
        for (std::size_t i = 0; i < sz; ++i) {
            oa[i] = pack[i].real();
            ob[i] = pack[i].imag();
        }
    }
    return out;
}

CovarianceSymbol Sampler::exact_covariance() const
{
    if (spec_.kind == SamplerKind::gaussian_spectral) return symbol_;

    const GridSpec g = spec_.grid;
    const double h3 = g.h() * g.h() * g.h();
    const double radius = spec_.kernel_radius;
    const double amp = kernel_amp_;

    // kernel support nodes (integer offsets), for symbol evaluation at
    // arbitrary k: A(k) = sum_x e^{ik.x} a(x), q0_hat = h^3 A(k)^2 I.
    struct Node { double x, y, z, w; };
    auto nodes = std::make_shared<std::vector<Node>>();
    int reach = int(std::ceil(radius / g.h()));
    for (int dz = -reach; dz <= reach; ++dz)
        for (int dy = -reach; dy <= reach; ++dy)
            for (int dx = -reach; dx <= reach; ++dx) {
                double r = g.h() * std::sqrt(double(dx * dx + dy * dy + dz * dz));
                double p = radius == 0.0 ? (dx == 0 && dy == 0 && dz == 0 ? 1.0 : 0.0)
                                         : kernel_profile(r, radius);
                if (p != 0.0)
                    nodes->push_back({g.h() * dx, g.h() * dy, g.h() * dz, amp * p});
            }

    CovarianceSymbol s;
    s.diagonal = true;
    s.corr_range = 2.0 * radius;
    auto amp_at = [nodes](const Vec3& k) {
        // even real kernel: the transform is the plain cosine sum
        double a = 0.0;
        for (const Node& nd : *nodes) a += nd.w * std::cos(k[0] * nd.x + k[1] * nd.y + k[2] * nd.z);
        return a;
    };
    s.eval_diag = [amp_at, h3](const Vec3& k) {
        double a = amp_at(k);
        return Vec8d(Vec8d::Constant(h3 * a * a));
    };
    s.eval = [amp_at, h3](const Vec3& k) {
        double a = amp_at(k);
        return Mat8c(h3 * a * a * Mat8c::Identity());
    };
    return s;
}

double Sampler::correlation_range() const
{
    if (spec_.kind == SamplerKind::finite_range_moving_average)
        return 2.0 * spec_.kernel_radius;
    return symbol_.corr_range;
}

RealField8 Sampler::noise_pullback(const RealField8& g) const
{
    if (!has_noise_pullback())
        throw std::logic_error("noise_pullback: only available for the moving-average sampler");
    if (!(g.grid == spec_.grid)) throw std::invalid_argument("noise_pullback: grid mismatch");

    const GridSpec& gr = spec_.grid;
    const std::size_t sz = gr.size();
    const double h3 = gr.h() * gr.h() * gr.h();
    RealField8 out(gr);
    std::vector<cplx> work(sz);
    for (int c = 0; c < 8; ++c) {
        for (std::size_t i = 0; i < sz; ++i) work[i] = cplx(g.data[c * sz + i], 0.0);
        fft3_forward(work, gr);
        for (std::size_t i = 0; i < sz; ++i) work[i] *= kernel_spectrum_[i];
        fft3_inverse(work, gr);
        for (std::size_t i = 0; i < sz; ++i) out.data[c * sz + i] = h3 * work[i].real();
    }
    return out;
}

std::vector<double> Sampler::project_noise(std::uint64_t index,
                                           const std::vector<const RealField8*>& weights) const
{
    if (!has_noise_pullback())
        throw std::logic_error("project_noise: only available for the moving-average sampler");
    const std::size_t total = 8 * spec_.grid.size();
    for (const RealField8* w : weights)
        if (!(w->grid == spec_.grid)) throw std::invalid_argument("project_noise: grid mismatch");

    Xoshiro256pp rng(derive_stream_seed(spec_.seed, index));
    std::vector<double> acc(weights.size(), 0.0);
    const std::size_t K = weights.size();
    for (std::size_t i = 0; i < total; ++i) {
        double s = rng.sign();
        for (std::size_t j = 0; j < K; ++j) acc[j] += s * weights[j]->data[i];
    }
    return acc;
}

CovarianceAccumulator::CovarianceAccumulator(const GridSpec& grid,
                                             const std::vector<Eigen::Vector3i>& offsets)
    : grid_(grid)
{
    // canonicalize offsets: keep lexicographically nonnegative representative
    for (const auto& z : offsets) {
        Eigen::Vector3i c = z;
        if (c[2] < 0 || (c[2] == 0 && (c[1] < 0 || (c[1] == 0 && c[0] < 0)))) c = -c;
        bool known = false;
        for (const auto& o : offsets_)
            if (o == c) known = true;
        if (!known) offsets_.push_back(c);
    }
    sum_.assign(offsets_.size(), Mat8d::Zero());
    sumsq_.assign(offsets_.size(), Mat8d::Zero());
}

void CovarianceAccumulator::add(const RealField8& field)
{
    const GridSpec& g = grid_;
    if (!(field.grid == g)) throw std::invalid_argument("CovarianceAccumulator: grid mismatch");
    const std::size_t sz = g.size();

    Vec8d fm = Vec8d::Zero();
    for (int c = 0; c < 8; ++c) {
        double acc = 0.0;
        const double* p = &field.data[std::size_t(c) * sz];
        for (std::size_t i = 0; i < sz; ++i) acc += p[i];
        fm[c] = acc / double(sz);
    }
    mean_sum_ += fm;
    mean_sumsq_ += Vec8d(fm.cwiseProduct(fm));

    for (std::size_t oi = 0; oi < offsets_.size(); ++oi) {
        const Eigen::Vector3i& z = offsets_[oi];
        Mat8d t = Mat8d::Zero();
        double va[8], vb[8];
        for (int iz = 0; iz < g.n; ++iz) {
            int jz = ((iz + z[2]) % g.n + g.n) % g.n;
            for (int iy = 0; iy < g.n; ++iy) {
                int jy = ((iy + z[1]) % g.n + g.n) % g.n;
                const std::size_t rowa = g.linear(0, iy, iz), rowb0 = g.linear(0, jy, jz);
                for (int ix = 0; ix < g.n; ++ix) {
                    int jx = ((ix + z[0]) % g.n + g.n) % g.n;
                    std::size_t a = rowa + ix, b = rowb0 + jx;
                    for (int c = 0; c < 8; ++c) {
                        va[c] = field.data[c * sz + a];
                        vb[c] = field.data[c * sz + b];
                    }
                    for (int c1 = 0; c1 < 8; ++c1)
                        for (int c2 = 0; c2 < 8; ++c2) t(c1, c2) += va[c1] * vb[c2];
                }
            }
        }
        t /= double(sz);
        sum_[oi] += t;
        sumsq_[oi] += Mat8d(t.cwiseProduct(t));
    }
    ++samples_;
}

CovarianceEstimate CovarianceAccumulator::finalize() const
{
    if (samples_ < 2)
        throw std::invalid_argument("CovarianceAccumulator: need at least 2 samples");
    CovarianceEstimate est;
    est.offsets_ = offsets_;
    est.samples_ = samples_;
    const double M = double(samples_);
    est.mean_.resize(offsets_.size());
    est.se_.resize(offsets_.size());
    for (std::size_t oi = 0; oi < offsets_.size(); ++oi) {
        est.mean_[oi] = sum_[oi] / M;
        Mat8d var =
            (sumsq_[oi] / M - Mat8d(est.mean_[oi].cwiseProduct(est.mean_[oi]))) * (M / (M - 1.0));
        est.se_[oi] = (var.cwiseMax(0.0) / M).cwiseSqrt();
    }
    est.comp_mean_ = mean_sum_ / M;
    Vec8d var = (mean_sumsq_ / M - Vec8d(est.comp_mean_.cwiseProduct(est.comp_mean_))) *
                (M / (M - 1.0));
    est.comp_mean_se_ = (var.cwiseMax(0.0) / M).cwiseSqrt();
    return est;
}

CovarianceEstimate empirical_covariance(const std::vector<RealField8>& samples,
                                        const std::vector<Eigen::Vector3i>& offsets)
{
    if (samples.size() < 2)
        throw std::invalid_argument("empirical_covariance: need at least 2 samples");
    CovarianceAccumulator acc(samples.front().grid, offsets);
    for (const auto& f : samples) acc.add(f);
    return acc.finalize();
}

int CovarianceEstimate::find(const Eigen::Vector3i& offset, bool& transposed) const
{
    Eigen::Vector3i c = offset;
    transposed = false;
    if (c[2] < 0 || (c[2] == 0 && (c[1] < 0 || (c[1] == 0 && c[0] < 0)))) {
        c = -c;
        transposed = true;
    }
    for (std::size_t i = 0; i < offsets_.size(); ++i)
        if (offsets_[i] == c) return int(i);
    throw std::invalid_argument("CovarianceEstimate: offset was not estimated");
}

Mat8d CovarianceEstimate::value(const Eigen::Vector3i& offset) const
{
    bool tr = false;
    int i = find(offset, tr);
    return tr ? Mat8d(mean_[i].transpose()) : mean_[i];
}

Mat8d CovarianceEstimate::standard_error(const Eigen::Vector3i& offset) const
{
    bool tr = false;
    int i = find(offset, tr);
    return tr ? Mat8d(se_[i].transpose()) : se_[i];
}

std::string to_string(SamplerKind k)
{
    return k == SamplerKind::gaussian_spectral ? "gaussian_spectral" : "moving_average";
}

std::string to_string(SymbolFamily f)
{
    return f == SymbolFamily::identity ? "identity" : "gaussian_bump";
}

SamplerKind sampler_kind_from_string(const std::string& s)
{
    if (s == "gaussian_spectral") return SamplerKind::gaussian_spectral;
    if (s == "moving_average") return SamplerKind::finite_range_moving_average;
    throw std::invalid_argument("unknown sampler kind: " + s);
}

SymbolFamily symbol_family_from_string(const std::string& s)
{
    if (s == "identity") return SymbolFamily::identity;
    if (s == "gaussian_bump") return SymbolFamily::gaussian_bump;
    throw std::invalid_argument("unknown symbol family: " + s);
}

}  // namespace dirac
