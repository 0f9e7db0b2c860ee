#include "optstop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "entry_walk.hpp"
#include "optstop/errors.hpp"
#include "optstop/parallel.hpp"

namespace optstop {
namespace detail {

WalkSetup make_walk(const Boundary& boundary, const GbmParams& params, StartPoint start,
                    double dt, bool bridge, const EntryOptions& options) {
    params.validate();
    if (params.perpetual()) throw InvalidInput("entry-time sampling needs a finite horizon");
    if (!(start.x > 0.0)) throw InvalidInput("entry-time sampling: start state must be positive");
    const double remaining = params.horizon - start.t;
    if (!(remaining > 0.0)) throw InvalidInput("entry-time sampling: no remaining horizon");
    if (!(dt > 0.0) || dt > remaining / 100.0 * (1.0 + 1e-12)) {
        throw InvalidInput("entry-time sampling: dt must lie in (0, (T - t)/100]");
    }
    const auto n = static_cast<std::size_t>(std::ceil(remaining / dt - 1e-9));

    WalkSetup w;
    w.h = remaining / static_cast<double>(n);
    w.y0 = std::log(start.x);
    w.drift = (params.r - 0.5 * params.sigma * params.sigma) * w.h;
    w.vol_step = params.sigma * std::sqrt(w.h);
    w.bridge_scale = 2.0 / (params.sigma * params.sigma * w.h);
    w.bridge = bridge;
    w.exclude_start = options.exclude_start;
    w.log_level.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double level = boundary.at(start.t + static_cast<double>(k) * w.h) - options.level_offset;
        if (!(level > 0.0)) throw InvalidInput("entry-time sampling: shifted boundary must stay positive");
        w.log_level[k] = std::log(level);
    }
    return w;
}

}  // namespace detail

double EntryTimeSamples::hit_fraction() const {
    if (paths.empty()) return 0.0;
    const auto hits = std::count_if(paths.begin(), paths.end(), [](const auto& s) { return s.hit; });
    return static_cast<double>(hits) / static_cast<double>(paths.size());
}

EstimateWithError EntryTimeSamples::mean_tau() const {
    std::vector<double> taus(paths.size());
    std::transform(paths.begin(), paths.end(), taus.begin(), [](const auto& s) { return s.tau; });
    return summarize(taus);
}

EstimateWithError EntryTimeSamples::prob_tau_at_least(double eps) const {
    EstimateWithError e;
    e.n = paths.size();
    if (e.n == 0) return e;
    const auto count =
        std::count_if(paths.begin(), paths.end(), [eps](const auto& s) { return s.tau >= eps; });
    e.mean = static_cast<double>(count) / static_cast<double>(e.n);
    e.se = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(e.n));
    return e;
}

double bridge_resolution(const GbmParams& params, double level, double dt) {
    return params.sigma * level * std::sqrt(dt) * 1e-2;
}

EntryTimeSamples sample_entry_time(const Boundary& boundary, const GbmParams& params,
                                   StartPoint start, const McControls& mc,
                                   const EntryOptions& options) {
    if (mc.n_paths == 0) throw InvalidInput("sample_entry_time: n_paths must be positive");
    const detail::WalkSetup walk = detail::make_walk(boundary, params, start, mc.dt, mc.bridge, options);

    EntryTimeSamples out;
    out.remaining = params.horizon - start.t;
    out.step = walk.h;
    out.paths.resize(mc.n_paths);

    const double level0 = boundary.at(start.t) - options.level_offset;
    if (start.x < level0 - bridge_resolution(params, level0, mc.dt)) {
        out.degenerate_start = true;
        for (auto& s : out.paths) s = {0.0, true, false, start.x};
        return out;
    }

    parallel_for(mc.n_paths, [&](std::size_t p) {
        detail::NoVisit none;
        const detail::WalkResult r = detail::walk_path(walk, mc.seed, p, none);
        out.paths[p] = {r.tau, r.hit, r.bridged, std::exp(r.y_tau)};
    });
    return out;
}

bool RegularityScan::monotone_trend() const {
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        for (std::size_t n = 0; n + 1 < x_n.size(); ++n) {
            const auto& a = cell(n, e);
            const auto& b = cell(n + 1, e);
            if (b.p_hat > a.p_hat + 2.0 * std::hypot(a.se, b.se)) return false;
        }
    }
    return true;
}

bool RegularityScan::final_is_minimum() const {
    if (x_n.empty()) return false;
    const std::size_t last = x_n.size() - 1;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const auto& f = cell(last, e);
        for (std::size_t n = 0; n < last; ++n) {
            const auto& a = cell(n, e);
            if (f.p_hat > a.p_hat + 2.0 * std::hypot(a.se, f.se)) return false;
        }
    }
    return true;
}

RegularityScan green_scan(const Boundary& boundary, const GbmParams& params, double t,
                          const ScanControls& scan, const McControls& mc) {
    params.validate();
    if (scan.n_terms < 4) throw InvalidInput("green_scan: n_terms must be at least 4");
    if (!(scan.eta0 > 0.0)) throw InvalidInput("green_scan: eta0 must be positive");
    if (scan.eps_list.empty()) throw InvalidInput("green_scan: eps_list is empty");
    if (!(t < params.horizon)) throw InvalidInput("green_scan: boundary point has no remaining horizon");
    for (double e : scan.eps_list) {
        if (!(e > 0.0)) throw InvalidInput("green_scan: eps values must be positive");
    }

    RegularityScan out;
    out.t = t;
    out.b = boundary.at(t);
    out.eps_list = scan.eps_list;
    for (std::size_t n = 1; n <= scan.n_terms; ++n) {
        const double x = out.b * (1.0 + std::ldexp(scan.eta0, -static_cast<int>(n)));
        // Common seed across n: the flow is order preserving, so tau is
        // monotone in x_n path by path.
        const EntryTimeSamples s = sample_entry_time(boundary, params, {t, x}, mc);
        out.x_n.push_back(x);
        const EstimateWithError mt = s.mean_tau();
        out.mean_tau.push_back(mt);
        for (double eps : scan.eps_list) {
            const EstimateWithError p = s.prob_tau_at_least(eps);
            out.cells.push_back({n, x, eps, p.mean, p.se, mt.mean});
        }
    }
    return out;
}

StableBoundaryReport stable_boundary_check(const Boundary& boundary, const GbmParams& params,
                                           double t, const McControls& mc,
                                           std::optional<double> delta, double eps0) {
    if (!boundary.nondecreasing()) {
        throw InvalidInput("stable_boundary_check: boundary must be nondecreasing");
    }
    StableBoundaryReport rep;
    rep.t = t;
    rep.b = boundary.at(t);
    rep.delta = delta.value_or(bridge_resolution(params, rep.b, mc.dt));
    rep.eps0 = eps0;
    if (rep.delta < 0.0) throw InvalidInput("stable_boundary_check: delta must be nonnegative");

    const StartPoint start{t, rep.b};
    const EntryTimeSamples on_d = sample_entry_time(boundary, params, start, mc, {true, 0.0});
    const EntryTimeSamples on_interior = sample_entry_time(boundary, params, start, mc, {true, rep.delta});

    rep.n_paths = mc.n_paths;
    std::vector<double> diff(mc.n_paths);
    std::size_t over = 0;
    double sum = 0.0;
    for (std::size_t p = 0; p < mc.n_paths; ++p) {
        diff[p] = on_interior.paths[p].tau - on_d.paths[p].tau;
        sum += diff[p];
        if (diff[p] > eps0) ++over;
    }
    rep.fraction_over_eps0 = static_cast<double>(over) / static_cast<double>(mc.n_paths);
    rep.mean_difference = sum / static_cast<double>(mc.n_paths);
    std::sort(diff.begin(), diff.end());
    auto quantile = [&](double q) {
        return diff[std::min(diff.size() - 1, static_cast<std::size_t>(q * static_cast<double>(diff.size())))];
    };
    rep.q50 = quantile(0.5);
    rep.q90 = quantile(0.9);
    rep.q99 = quantile(0.99);
    rep.max_difference = diff.back();
    rep.pass = rep.fraction_over_eps0 <= 0.02;
    return rep;
}

void write_green_scan_csv(std::ostream& out, const RegularityScan& scan) {
    const auto prec = out.precision(12);
    out << "n,x_n,eps,p_hat,se,mean_tau\n";
    for (const auto& c : scan.cells) {
        out << c.n << ',' << c.x_n << ',' << c.eps << ',' << c.p_hat << ',' << c.se << ',' << c.mean_tau << '\n';
    }
    out.precision(prec);
}

void write_stable_csv(std::ostream& out, const StableBoundaryReport& r) {
    const auto prec = out.precision(12);
    out << "t,b,delta,eps0,n_paths,fraction_over_eps0,mean_difference,q50,q90,q99,max_difference,pass\n";
    out << r.t << ',' << r.b << ',' << r.delta << ',' << r.eps0 << ',' << r.n_paths << ','
        << r.fraction_over_eps0 << ',' << r.mean_difference << ',' << r.q50 << ',' << r.q90 << ','
        << r.q99 << ',' << r.max_difference << ',' << (r.pass ? 1 : 0) << '\n';
    out.precision(prec);
}

}  // namespace optstop
