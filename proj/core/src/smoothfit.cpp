#include "optstop/smoothfit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entry_walk.hpp"
#include "optstop/errors.hpp"
#include "optstop/parallel.hpp"

namespace optstop {
namespace {

struct Approach {
    std::size_t row;
    double t;
    double b;
    std::vector<double> x;
};

Approach approach_points(const ValueGrid& grid, const Boundary& boundary, double t,
                         const ApproachControls& a) {
    if (a.n_terms < 3) throw InvalidInput("approach sequence needs at least 3 terms");
    if (!(a.eta0 > 0.0)) throw InvalidInput("approach sequence needs eta0 > 0");
    const double horizon = grid.params().horizon;
    if (!(t > 0.0 && t < horizon)) throw InvalidInput("boundary point must lie strictly inside (0, T)");

    Approach out;
    out.row = grid.row_of(t);
    if (out.row == 0 || out.row + 1 >= grid.rows()) {
        throw InvalidInput("boundary point needs a grid row on each side");
    }
    out.t = grid.t_grid()[out.row];
    out.b = boundary.at(out.t);
    for (std::size_t n = 1; n <= a.n_terms; ++n) {
        out.x.push_back(out.b * (1.0 + std::ldexp(a.eta0, -static_cast<int>(n))));
    }

    // Consecutive points, and the last point and b, at least 2 log-cells apart.
    const double dy = grid.dlogx();
    double min_sep = std::log(out.x.back() / out.b);
    for (std::size_t n = 0; n + 1 < out.x.size(); ++n) {
        min_sep = std::min(min_sep, std::log(out.x[n] / out.x[n + 1]));
    }
    if (min_sep < 2.0 * dy) {
        const double cells = static_cast<double>(grid.cols() - 1) * 2.0 * dy / min_sep;
        throw ResolutionError("approach points collide on the grid: need at least " +
                                  std::to_string(static_cast<std::size_t>(std::ceil(cells))) +
                                  " space cells",
                              static_cast<std::size_t>(std::ceil(cells)));
    }
    if (out.x.front() >= grid.x_grid()[grid.cols() - 3]) {
        throw InvalidInput("approach sequence leaves the grid");
    }
    return out;
}

// Richardson tableau for errors linear in h, with h halving per term; up to
// two elimination levels, the top entry uses the last three estimates.
void extrapolate(LimitEstimate& e) {
    std::vector<double> level = e.estimates;
    const std::size_t levels = std::min<std::size_t>(2, level.size() - 1);
    for (std::size_t k = 1; k <= levels; ++k) {
        const double f = std::ldexp(1.0, static_cast<int>(k));
        std::vector<double> next(level.size() - 1);
        for (std::size_t i = 0; i + 1 < level.size(); ++i) next[i] = (f * level[i + 1] - level[i]) / (f - 1.0);
        level = std::move(next);
    }
    e.extrapolated = level.back();
    e.discrepancy = std::abs(e.extrapolated - e.target);
    const std::size_t m = e.estimates.size();
    const double d_old = std::abs(e.estimates[m - 2] - e.estimates[m - 3]);
    const double d_new = std::abs(e.estimates[m - 1] - e.estimates[m - 2]);
    e.observed_order = d_new > 0.0 && d_old > 0.0 ? std::log2(d_old / d_new) : 0.0;
}

}  // namespace

LimitEstimate space_fit_limit(const ValueGrid& grid, const Boundary& boundary, double t,
                              const ApproachControls& approach) {
    const Approach a = approach_points(grid, boundary, t, approach);
    LimitEstimate e;
    e.kind = "space";
    e.t = a.t;
    e.boundary = a.b;
    e.x_n = a.x;
    e.target = -1.0;
    for (double x : a.x) e.estimates.push_back(grid.delta_at_row(a.row, x));
    extrapolate(e);
    return e;
}

TimeFitReport time_fit_limit(const ValueGrid& grid, const Boundary& boundary, double t,
                             const ApproachControls& approach) {
    const Approach a = approach_points(grid, boundary, t, approach);
    TimeFitReport rep;
    LimitEstimate& e = rep.limit;
    e.kind = "time";
    e.t = a.t;
    e.boundary = a.b;
    e.x_n = a.x;
    e.target = 0.0;
    const double two_dt = 2.0 * grid.dt();
    for (double x : a.x) {
        e.estimates.push_back((grid.value_at_row(a.row + 1, x) - grid.value_at_row(a.row - 1, x)) / two_dt);
    }
    extrapolate(e);

    rep.c = lipschitz_constant(grid.params(), a.t, grid.params().horizon).c;
    rep.tolerance = 0.02 * rep.c;
    const double tol = grid.fit_tol();
    rep.sign_ok = std::all_of(e.estimates.begin(), e.estimates.end(), [&](double v) { return v <= tol; });
    rep.lipschitz_ok = std::all_of(e.estimates.begin(), e.estimates.end(),
                                   [&](double v) { return v >= -rep.c * (1.0 + tol); });
    rep.pass = rep.sign_ok && rep.lipschitz_ok && e.discrepancy <= rep.tolerance;
    return rep;
}

DirectionalFit directional_fit_check(const ValueGrid& grid, const Boundary& boundary, double t,
                                     const ApproachControls& approach) {
    DirectionalFit out;
    out.space = space_fit_limit(grid, boundary, t, approach);
    out.t = out.space.t;
    out.c_side = out.space.extrapolated;
    // G(x) = K - x below the boundary (b < K), so the exercise-side slope is exact.
    out.d_side = -1.0;
    out.gap = std::abs(out.c_side - out.d_side);
    out.pass = out.gap <= 0.02;
    return out;
}

EstimateWithError mc_value_estimate(const Boundary& boundary, const GbmParams& params,
                                    StartPoint start, const McControls& mc) {
    const EntryTimeSamples s = sample_entry_time(boundary, params, start, mc);
    std::vector<double> payoff(s.paths.size());
    for (std::size_t p = 0; p < payoff.size(); ++p) {
        const auto& path = s.paths[p];
        payoff[p] = std::exp(-params.r * path.tau) * put_payoff(params.strike, path.x_tau);
    }
    return summarize(payoff);
}

namespace {

struct LagrangeVisitor {
    const std::vector<double>* discount;  // e^{-r s_k} h
    double log_k, log_lo, log_hi;
    double half_kernel;  // sigma^2 / (4 eps)
    double rk;
    double acc = 0.0;

    void interval(std::size_t k, double y, double fraction) {
        double rate = 0.0;
        if (y > log_lo && y < log_hi) rate += half_kernel * std::exp(2.0 * y);
        if (y < log_k) rate -= rk;
        acc += fraction * (*discount)[k] * rate;
    }
};

}  // namespace

LagrangeReport lagrange_check(const ValueGrid& grid, const Boundary& boundary, StartPoint start,
                              const McControls& mc, std::optional<double> bandwidth) {
    const GbmParams& params = grid.params();
    if (mc.n_paths < 2) throw InvalidInput("lagrange_check: need at least two paths");
    const detail::WalkSetup walk = detail::make_walk(boundary, params, start, mc.dt, mc.bridge, {});
    const double k = params.strike;
    const double eps = bandwidth.value_or(default_local_time_bandwidth(params, walk.h));
    if (!(eps > 0.0) || eps >= k) throw InvalidInput("lagrange_check: bandwidth must lie in (0, K)");

    LagrangeReport rep;
    rep.t = start.t;
    rep.x = start.x;
    rep.bandwidth = eps;
    rep.lhs = grid.value_at(start.t, start.x) - put_payoff(k, start.x);

    std::vector<double> discount(walk.steps());
    for (std::size_t i = 0; i < discount.size(); ++i) {
        discount[i] = std::exp(-params.r * static_cast<double>(i) * walk.h) * walk.h;
    }
    const double s2 = params.sigma * params.sigma;
    const LagrangeVisitor proto{&discount, std::log(k), std::log(k - eps), std::log(k + eps),
                                s2 / (4.0 * eps), params.r * k};

    std::vector<double> samples(mc.n_paths);
    parallel_for(mc.n_paths, [&](std::size_t p) {
        LagrangeVisitor v = proto;
        detail::walk_path(walk, mc.seed, p, v);
        samples[p] = v.acc;
    });
    const EstimateWithError est = summarize(samples);
    rep.rhs = est.mean;
    rep.se = est.se;
    if (rep.se > 0.0) {
        rep.z = (rep.lhs - rep.rhs) / rep.se;
    } else {
        rep.z = std::abs(rep.lhs - rep.rhs) <= grid.fit_tol() ? 0.0 : std::copysign(INFINITY, rep.lhs - rep.rhs);
    }
    rep.pass = std::abs(rep.z) <= 3.0;
    return rep;
}

std::vector<StartPoint> sample_continuation_points(const Boundary& boundary, const GbmParams& params,
                                                   std::size_t count, std::uint64_t seed,
                                                   double level_exclusion) {
    params.validate();
    CounterRng rng(derive_seed(seed, 0, 7));
    std::vector<StartPoint> out;
    const double k = params.strike;
    for (std::size_t attempts = 0; out.size() < count; ++attempts) {
        if (attempts > 1000 * (count + 1)) {
            throw InvalidInput("sample_continuation_points: exclusion band leaves no admissible points");
        }
        const double t = 0.9 * params.horizon * rng.uniform();
        const double lo = 1.02 * boundary.at(t);
        const double hi = 1.5 * k;
        if (!(hi > lo)) continue;
        const double x = lo + (hi - lo) * rng.uniform();
        if (std::abs(x - k) < level_exclusion) continue;
        out.push_back({t, x});
    }
    return out;
}

}  // namespace optstop
