// Acceptance run: one PASS/FAIL line per criterion on the benchmark put
// (K, r, sigma, T) = (100, 0.05, 0.2, 1). Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "optstop/diagnostics.hpp"
#include "optstop/flowsim.hpp"
#include "optstop/parallel.hpp"
#include "optstop/rng.hpp"
#include "optstop/putsolver.hpp"
#include "optstop/smoothfit.hpp"
#include "oracles.hpp"

using namespace optstop;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const GbmParams kBench{};
const std::vector<double> kFitTimes{0.1, 0.3, 0.5, 0.7, 0.9};

const ValueGrid& grid() {
    static const ValueGrid g = price_put_fd(kBench);
    return g;
}
const Boundary& boundary() {
    static const Boundary b = extract_boundary(grid());
    return b;
}

Verdict pricing() {
    Verdict v{true, ""};
    for (double x : {80.0, 100.0, 120.0}) {
        const double tree = price_put_binomial(kBench, x, 10000);
        const double fd = grid().value_at(0.0, x);
        const double rel = std::abs(fd - tree) / tree;
        v.pass = v.pass && rel <= 1e-3;
        v.detail += fmt("x=%g fd=%.5f tree=%.5f rel=%.1e; ", x, fd, tree, rel);
    }
    return v;
}

Verdict shape() {
    const Boundary& b = boundary();
    const double cell = b.cell_width_at_strike;
    const bool ok = b.nondecreasing() && b.max_violation_cells <= 1.0 && std::abs(b.b.back() - kBench.strike) <= cell &&
                    b.b.front() > 0.0 && b.b.front() < b.b.back();
    return {ok, fmt("b(0)=%.4f b(T)=%.4f cell=%.4f pre-projection drop=%.2f cells", b.b.front(), b.b.back(), cell,
                    b.max_violation_cells)};
}

Verdict space_fit() {
    Verdict v{true, ""};
    for (double t : kFitTimes) {
        const LimitEstimate e = space_fit_limit(grid(), boundary(), t);
        v.pass = v.pass && std::abs(e.extrapolated + 1.0) <= 0.02;
        v.detail += fmt("t=%.1f Vx=%.4f; ", t, e.extrapolated);
    }
    return v;
}

Verdict time_fit() {
    Verdict v{true, ""};
    for (double t : kFitTimes) {
        const TimeFitReport r = time_fit_limit(grid(), boundary(), t);
        v.pass = v.pass && r.pass;
        v.detail += fmt("t=%.1f Vt=%.4f (tol %.1f)%s; ", t, r.limit.extrapolated, r.tolerance,
                        r.sign_ok && r.lipschitz_ok ? "" : " samples out of [-c, tol]");
    }
    return v;
}

Verdict green() {
    const RegularityScan s = green_scan(boundary(), kBench, 0.5, {10, 0.1, {0.01}}, {100000, 1e-4, 20240601, true});
    const ScanCell& last = s.cell(s.x_n.size() - 1, 0);
    const bool ok = last.p_hat <= 0.02 && s.monotone_trend() && s.final_is_minimum();
    return {ok, fmt("P(tau_D >= 0.01): first %.4f, final %.4f +- %.4f, monotone %d", s.cell(0, 0).p_hat, last.p_hat,
                    last.se, int(s.monotone_trend() && s.final_is_minimum()))};
}

Verdict stable() {
    const StableBoundaryReport r = stable_boundary_check(boundary(), kBench, 0.5, {100000, 1e-4, 20240601, true});
    return {r.pass, fmt("fraction differing by > 1e-3: %.5f (delta %.2e, max diff %.2e)", r.fraction_over_eps0, r.delta,
                        r.max_difference)};
}

Verdict lagrange() {
    const McControls mc{100000, 1e-3, 20240601, true};
    const double eps = default_local_time_bandwidth(kBench, mc.dt);
    const auto starts = sample_continuation_points(boundary(), kBench, 10, mc.seed, 4.0 * eps);
    Verdict v{true, ""};
    double worst = 0.0;
    for (const auto& st : starts) {
        const LagrangeReport r = lagrange_check(grid(), boundary(), st, mc);
        v.pass = v.pass && r.pass;
        worst = std::max(worst, std::abs(r.z));
    }
    v.detail = fmt("10 points, max |z| = %.2f", worst);
    return v;
}

Verdict lipschitz() {
    const LipschitzReport r = lipschitz_bound_check(grid(), 0.5, {0.01, 0.02, 0.05});
    return {r.violations == 0, fmt("c=%.2f, %zu violations in %zu checks, worst margin %.3e", r.c, r.violations,
                                   r.checks, r.worst_margin)};
}

Verdict perpetual() {
    GbmParams p = kBench;
    p.horizon = std::numeric_limits<double>::infinity();
    const PerpetualPut pp = perpetual_put(p);
    const double oracle_b = threshold_argmax(p, 2.0 * p.strike);
    const double rel = std::abs(oracle_b - pp.b_star) / pp.b_star;
    // Value agreement is the sharp test: the threshold value is flat at its argmax.
    double worst_value = 0.0;
    for (double x : {80.0, 100.0, 150.0, 300.0}) {
        const double y = threshold_argmax(p, x);
        worst_value = std::max(worst_value, std::abs(threshold_value(p, y, x) - pp.value(x)) / pp.value(x));
    }
    const double fit = std::abs(pp.derivative(pp.b_star) + 1.0);
    const bool ok = worst_value <= 1e-8 && fit <= 1e-8 && rel <= 1e-6;
    return {ok, fmt("b*=%.8f oracle=%.8f, value rel %.1e, |V'(b*)+1|=%.1e", pp.b_star, oracle_b, worst_value, fit)};
}

Verdict flows() {
    // pathwise derivative vs central difference, GBM and a nonlinear SDE
    double worst = 0.0;
    SdeSpec s;
    s.mu = [](double x) { return x * (1.0 - x); };
    s.mu_prime = [](double x) { return 1.0 - 2.0 * x; };
    s.vol = [](double x) { return 0.3 * x; };
    s.vol_prime = [](double) { return 0.3; };
    s.domain_lo = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const FlowPath g = simulate_gbm_flow(kBench, 1.0, 100, derive_seed(1, i));
        const double x = 100.0, h = 1e-4 * x;
        const auto driver = brownian_increments(1.0, 100, derive_seed(2, i));
        const FlowPath f = simulate_sde_flow_with_driver(s, 0.7, 1.0, driver);
        const FlowPath up = simulate_sde_flow_with_driver(s, 0.7 + 7e-5, 1.0, driver);
        const FlowPath dn = simulate_sde_flow_with_driver(s, 0.7 - 7e-5, 1.0, driver);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double fd = (g.state(k, x + h) - g.state(k, x - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(g.deriv[k] - fd) / std::max(1.0, std::abs(g.deriv[k])));
        }
        for (std::size_t k = 0; k < f.size() && k < up.size() && k < dn.size(); ++k) {
            const double fd = (up.states[k] - dn.states[k]) / 1.4e-4;
            worst = std::max(worst, std::abs(f.deriv[k] - fd) / std::max(1.0, std::abs(f.deriv[k])));
        }
    }
    const double mass = oracle::density_mass(1.0, kBench);

    // local time at the strike from x = K with eps = 0.25
    const std::size_t n_paths = 100000, n_steps = 4000;
    const double eps = 0.25;
    std::vector<double> lt(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        lt[i] = local_time_estimate(simulate_gbm_flow(kBench, 1.0, n_steps, derive_seed(20240601, i)), kBench.strike,
                                    kBench.strike, eps);
    });
    const EstimateWithError e = summarize(lt);
    const double occupation = oracle::local_time_mean(kBench, kBench.strike, 1.0);
    const double discrete = oracle::discrete_local_time_mean(kBench, kBench.strike, 1.0, n_steps, eps);
    const double z = (e.mean - occupation) / e.se;
    const bool ok = worst <= 1e-3 && std::abs(mass - 1.0) <= 1e-6 && std::abs(z) <= 3.0;
    return {ok, fmt("deriv rel err %.1e, density mass-1 %.1e, local time %.4f +- %.4f vs occupation %.4f (z %.2f; "
                    "discrete-kernel mean %.4f)",
                    worst, mass - 1.0, e.mean, e.se, occupation, z, discrete)};
}

Verdict supremum() {
    const McControls mc{100000, 1e-3, 20240601, true};
    const double fd = grid().value_at(0.0, kBench.strike);
    Verdict v{true, fmt("fd=%.4f; ", fd)};
    for (double shift : {0.0, -2.0, 2.0, -5.0, 5.0}) {
        Boundary b = boundary();
        for (double& x : b.b) x += shift;
        const EstimateWithError est = mc_value_estimate(b, kBench, {0.0, kBench.strike}, mc);
        const double z = (est.mean - fd) / est.se;
        v.pass = v.pass && (shift == 0.0 ? std::abs(z) <= 3.0 : z <= 3.0);
        v.detail += fmt("%+g: %.4f (z %.1f); ", shift, est.mean, z);
    }
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"put pricing vs binomial oracle", pricing},
        {"boundary shape", shape},
        {"global space smooth fit", space_fit},
        {"global time smooth fit", time_fit},
        {"green regularity", green},
        {"stable boundary", stable},
        {"lagrange identity", lagrange},
        {"lipschitz bound", lipschitz},
        {"perpetual smooth fit", perpetual},
        {"flow machinery", flows},
        {"supremum property", supremum},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !v.pass;
        std::printf("%s %2zu %s [%.1fs] %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
