#include "dirac/equilibrium.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dirac {

namespace {

void check_budget(const GridSpec& grid, double t, double phi_radius, double corr_range)
{
    double reach = std::abs(t) + phi_radius + corr_range;
    if (!(reach < 0.5 * grid.length))
        throw std::invalid_argument(
            "no-wraparound budget violated: t + phi radius + correlation range = " +
            std::to_string(reach) + " >= L/2 = " + std::to_string(0.5 * grid.length));
}

// Plain dot product of the 8-component arrays, fixed accumulation order.
double flat_dot(const RealField8& a, const RealField8& b)
{
    double acc = 0.0;
    const std::size_t total = a.data.size();
    for (std::size_t i = 0; i < total; ++i) acc += a.data[i] * b.data[i];
    return acc;
}

void run_indexed(int count, int threads, const std::function<void(int)>& body)
{
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

EnsembleResult run_ensemble(const Propagator& prop, const Sampler& sampler,
                            const std::vector<TestFunction>& phis,
                            const std::vector<double>& times, int samples, int spot_checks,
                            int threads)
{
    if (samples < 2) throw std::invalid_argument("run_ensemble: need at least 2 samples");
    if (phis.empty() || times.empty())
        throw std::invalid_argument("run_ensemble: need at least one time and test function");
    const GridSpec& grid = prop.grid();
    for (const auto& phi : phis)
        for (double t : times) check_budget(grid, t, phi.radius, sampler.correlation_range());

    const int np = int(phis.size()), nt = int(times.size());
    EnsembleResult res;
    res.times = times;
    res.phi_count = np;
    res.samples = samples;
    res.projections.assign(std::size_t(nt) * np, std::vector<double>(samples, 0.0));

    // one adjoint evolution per (t, phi), shared by every sample
    std::vector<RealField8> evolved(std::size_t(nt) * np);
    for (int ti = 0; ti < nt; ++ti)
        for (int pi = 0; pi < np; ++pi)
            evolved[std::size_t(ti) * np + pi] = prop.adjoint_evolve(phis[pi], times[ti]);

    const bool pullback = sampler.has_noise_pullback();
    std::vector<RealField8> weights;
    std::vector<const RealField8*> weight_ptrs;
    if (pullback) {
        weights.reserve(evolved.size());
        for (const auto& g : evolved) weights.push_back(sampler.noise_pullback(g));
        for (const auto& w : weights) weight_ptrs.push_back(&w);
    }

    run_indexed(samples, threads, [&](int s) {
        if (pullback) {
            std::vector<double> vals = sampler.project_noise(std::uint64_t(s), weight_ptrs);
            for (std::size_t j = 0; j < vals.size(); ++j) res.projections[j][s] = vals[j];
        } else {
            RealField8 field = sampler.sample(std::uint64_t(s));
            for (std::size_t j = 0; j < evolved.size(); ++j)
                res.projections[j][s] = inner(field, evolved[j]);
        }
    });

    res.summaries.reserve(res.projections.size());
    for (const auto& series : res.projections) res.summaries.push_back(summarize_moments(series));

    // dual-route spot checks: materialize the field and evolve it forward
    res.spot_checks = std::min(spot_checks, samples);
    if (res.spot_checks > 0) {
        double rms = 0.0;
        int count = 0;
        for (int s = 0; s < res.spot_checks; ++s) {
            RealField8 field = sampler.sample(std::uint64_t(s));
            for (int ti = 0; ti < nt; ++ti) {
                RealField8 forward = prop.evolve(field, times[ti]);
                for (int pi = 0; pi < np; ++pi) {
                    double pf = inner(forward, phis[pi].field);
                    double pa = res.projections[std::size_t(ti) * np + pi][s];
                    res.route_mismatch = std::max(res.route_mismatch, std::abs(pf - pa));
                    rms += pa * pa;
                    ++count;
                }
            }
        }
        res.route_scale = std::sqrt(rms / count);
    }
    return res;
}

std::vector<CharFnRow> char_functional(const EnsembleResult& result, int ti, int pi,
                                       const std::vector<double>& lambdas, double q_form_t,
                                       double q_form_inf)
{
    const std::vector<double>& xs = result.series(ti, pi);
    std::vector<CharFnRow> rows;
    rows.reserve(lambdas.size());
    for (double lam : lambdas) {
        CharFnRow row;
        row.lambda = lam;
        if (lam == 0.0) {
            row.estimate = {1.0, 0.0};
            row.se = 0.0;
        } else {
            CharFnEstimate est = empirical_char_fn(xs, lam);
            row.estimate = est.value;
            row.se = est.se;
        }
        row.gauss_t = std::exp(-0.5 * lam * lam * q_form_t);
        row.gauss_inf = std::exp(-0.5 * lam * lam * q_form_inf);
        rows.push_back(row);
    }
    return rows;
}

RoomCorridorLayout RoomCorridorLayout::build(const GridSpec& grid, double t, double delta,
                                             double rbar, bool round_to_grid)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("RoomCorridorLayout: delta must be in (0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("RoomCorridorLayout: t must be positive");

    RoomCorridorLayout lay;
    lay.t = t;
    lay.delta = delta;
    double d = t > 2.0 ? t / std::log(t) : t;
    double rho = std::pow(t, 1.0 - delta);
    d = std::max({grid.h(), 1.0, d});
    rho = std::max(grid.h(), rho);
    if (round_to_grid) {
        d = std::max(grid.h(), std::round(d / grid.h()) * grid.h());
        rho = std::max(grid.h(), std::round(rho / grid.h()) * grid.h());
    }
    lay.room_width = d;
    lay.corridor_width = rho;
    lay.slab_period = d + rho;
    lay.support_halfwidth = t + rbar;

    const double half = 0.5 * grid.length;
    lay.j_min = int(std::floor(-half / lay.slab_period));
    lay.j_max = int(std::floor((half - 1e-12) / lay.slab_period));

    if (lay.support_halfwidth >= half)
        throw std::invalid_argument("RoomCorridorLayout: inflated cone does not fit the torus");
    return lay;
}

int RoomCorridorLayout::slab_of(double x3) const
{
    return int(std::floor(x3 / slab_period));
}

bool RoomCorridorLayout::is_room(double x3) const
{
    double s = x3 - slab_period * std::floor(x3 / slab_period);
    return s < room_width;
}

bool RoomCorridorLayout::intersects_support(int j) const
{
    double lo = j * slab_period, hi = lo + slab_period;
    return hi >= -support_halfwidth && lo <= support_halfwidth;
}

double RoomCorridorTerms::sum() const
{
    CompensatedSum s;
    for (double v : rooms) s.add(v);
    for (double v : corridors) s.add(v);
    return s.value();
}

namespace {

// Per-plane dot products along x3; slab assignment is constant on planes.
std::vector<double> plane_dots(const RealField8& a, const RealField8& b)
{
    const GridSpec& g = a.grid;
    const std::size_t sz = g.size(), plane = std::size_t(g.n) * g.n;
    std::vector<double> dots(g.n, 0.0);
    for (int c = 0; c < 8; ++c)
        for (int iz = 0; iz < g.n; ++iz) {
            const double* pa = &a.data[c * sz + iz * plane];
            const double* pb = &b.data[c * sz + iz * plane];
            double acc = 0.0;
            for (std::size_t i = 0; i < plane; ++i) acc += pa[i] * pb[i];
            dots[iz] += acc;
        }
    return dots;
}

struct SlabBins {
    std::vector<int> slab;      // per iz: j - j_min
    std::vector<bool> room;     // per iz: room vs corridor
};

SlabBins bin_planes(const GridSpec& g, const RoomCorridorLayout& lay)
{
    SlabBins bins;
    bins.slab.resize(g.n);
    bins.room.resize(g.n);
    for (int iz = 0; iz < g.n; ++iz) {
        double x3 = g.coord(iz);
        bins.slab[iz] = lay.slab_of(x3) - lay.j_min;
        bins.room[iz] = lay.is_room(x3);
    }
    return bins;
}

}  // namespace

RoomCorridorTerms room_corridor_decompose(const Propagator& prop, const RealField8& psi0,
                                          const TestFunction& phi, double t, double delta,
                                          bool round_to_grid)
{
    const GridSpec& g = prop.grid();
    RoomCorridorLayout lay = RoomCorridorLayout::build(g, t, delta, phi.radius, round_to_grid);

    RealField8 gt = prop.adjoint_evolve(phi, t);
    std::vector<double> dots = plane_dots(psi0, gt);
    SlabBins bins = bin_planes(g, lay);

    RoomCorridorTerms terms;
    terms.layout = lay;
    terms.rooms.assign(lay.room_count(), 0.0);
    terms.corridors.assign(lay.room_count(), 0.0);
    const double h3 = g.h() * g.h() * g.h();
    for (int iz = 0; iz < g.n; ++iz) {
        double v = dots[iz] * h3;
        if (bins.room[iz])
            terms.rooms[bins.slab[iz]] += v;
        else
            terms.corridors[bins.slab[iz]] += v;
    }
    terms.projection = inner(psi0, gt);
    return terms;
}

std::vector<VarianceScalingRow> variance_scaling_report(const Propagator& prop,
                                                        const Sampler& sampler,
                                                        const TestFunction& phi,
                                                        const std::vector<double>& t_grid,
                                                        double delta, int samples, int threads,
                                                        bool round_to_grid)
{
    if (samples < 4) throw std::invalid_argument("variance_scaling_report: need >= 4 samples");
    const GridSpec& g = prop.grid();
    const int nt = int(t_grid.size());

    std::vector<RoomCorridorLayout> layouts;
    std::vector<RealField8> gts;
    std::vector<SlabBins> bins;
    for (double t : t_grid) {
        check_budget(g, t, phi.radius, sampler.correlation_range());
        layouts.push_back(RoomCorridorLayout::build(g, t, delta, phi.radius, round_to_grid));
        gts.push_back(prop.adjoint_evolve(phi, t));
        bins.push_back(bin_planes(g, layouts.back()));
    }

    struct Accum {
        std::vector<double> room_m2, corr_m2;  // second moments per slab
        double recon = 0.0, out_support = 0.0, proj_rms = 0.0;
    };
    std::vector<Accum> acc(nt);
    for (int ti = 0; ti < nt; ++ti) {
        acc[ti].room_m2.assign(layouts[ti].room_count(), 0.0);
        acc[ti].corr_m2.assign(layouts[ti].room_count(), 0.0);
    }

    const double h3 = g.h() * g.h() * g.h();
    std::vector<std::vector<double>> sample_rows(samples);

    run_indexed(samples, threads, [&](int s) {
        RealField8 field = sampler.sample(std::uint64_t(s));
        std::vector<double>& row = sample_rows[s];
        row.reserve(std::size_t(nt) * 4);
        for (int ti = 0; ti < nt; ++ti) {
            std::vector<double> dots = plane_dots(field, gts[ti]);
            const RoomCorridorLayout& lay = layouts[ti];
            std::vector<double> rooms(lay.room_count(), 0.0), corrs(lay.room_count(), 0.0);
            for (int iz = 0; iz < g.n; ++iz) {
                double v = dots[iz] * h3;
                if (bins[ti].room[iz])
                    rooms[bins[ti].slab[iz]] += v;
                else
                    corrs[bins[ti].slab[iz]] += v;
            }
            double proj = inner(field, gts[ti]);
            CompensatedSum total;
            double out_sup = 0.0;
            for (int j = 0; j < lay.room_count(); ++j) {
                total.add(rooms[j]);
                total.add(corrs[j]);
                if (!lay.intersects_support(j + lay.j_min))
                    out_sup = std::max({out_sup, std::abs(rooms[j]), std::abs(corrs[j])});
            }
            row.push_back(proj);
            row.push_back(std::abs(total.value() - proj));
            row.push_back(out_sup);
            for (int j = 0; j < lay.room_count(); ++j) row.push_back(rooms[j]);
            for (int j = 0; j < lay.room_count(); ++j) row.push_back(corrs[j]);
        }
    });

    // sequential reduction in sample order keeps results schedule-independent
    for (int s = 0; s < samples; ++s) {
        std::size_t pos = 0;
        for (int ti = 0; ti < nt; ++ti) {
            const RoomCorridorLayout& lay = layouts[ti];
            double proj = sample_rows[s][pos++];
            double recon = sample_rows[s][pos++];
            double out_sup = sample_rows[s][pos++];
            acc[ti].proj_rms += proj * proj;
            acc[ti].recon = std::max(acc[ti].recon, recon);
            acc[ti].out_support = std::max(acc[ti].out_support, out_sup);
            for (int j = 0; j < lay.room_count(); ++j) {
                double r = sample_rows[s][pos++];
                acc[ti].room_m2[j] += r * r;
            }
            for (int j = 0; j < lay.room_count(); ++j) {
                double cc = sample_rows[s][pos++];
                acc[ti].corr_m2[j] += cc * cc;
            }
        }
    }

    std::vector<VarianceScalingRow> rows;
    for (int ti = 0; ti < nt; ++ti) {
        VarianceScalingRow row;
        row.t = t_grid[ti];
        row.layout = layouts[ti];
        for (double v : acc[ti].room_m2)
            row.max_room_var = std::max(row.max_room_var, v / samples);
        for (double v : acc[ti].corr_m2)
            row.max_corridor_var = std::max(row.max_corridor_var, v / samples);
        row.room_ratio = row.max_room_var * row.t / row.layout.room_width;
        row.corridor_ratio = row.max_corridor_var * row.t / row.layout.corridor_width;
        double scale = std::sqrt(acc[ti].proj_rms / samples);
        row.reconstruction_error = scale > 0.0 ? acc[ti].recon / scale : acc[ti].recon;
        row.out_of_support = scale > 0.0 ? acc[ti].out_support / scale : acc[ti].out_support;
        rows.push_back(row);
    }
    return rows;
}

DecayProbe decay_probe(const Propagator& prop, const TestFunction& phi,
                       const std::vector<double>& t_grid)
{
    const GridSpec& g = prop.grid();
    DecayProbe probe;
    for (double t : t_grid) {
        if (!(std::abs(t) + phi.radius < 0.5 * g.length))
            throw std::invalid_argument("decay_probe: t + phi radius exceeds L/2");
        probe.times.push_back(t);
        probe.sup_norms.push_back(sup_norm(prop.adjoint_evolve(phi, t)));
    }
    std::vector<double> ts, sups;
    for (std::size_t i = 0; i < probe.times.size(); ++i)
        if (probe.times[i] > 0.0) {
            ts.push_back(probe.times[i]);
            sups.push_back(probe.sup_norms[i]);
        }
    if (ts.size() >= 2) probe.fit = fit_power_law(ts, sups);
    return probe;
}

}  // namespace dirac
