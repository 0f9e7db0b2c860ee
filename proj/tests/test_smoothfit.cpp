#include <cmath>
#include <sstream>

#include "bench_grid.hpp"
#include "doctest.h"
#include "optstop/errors.hpp"
#include "optstop/smoothfit.hpp"

using namespace optstop;

namespace {

// c(T - t) straight from the maximization in y, which is attained at
// y = (r - 3 sigma^2 / 2) s: sigma K^2 max_s e^{(sigma^2 - r) s} / sqrt(2 pi s).
double lipschitz_closed_form(const GbmParams& p, double tau) {
    const double a = p.sigma * p.sigma - p.r;
    const double lo = tau / 2.0, hi = 2.0 * tau;
    auto g = [&](double s) { return std::exp(a * s) / std::sqrt(2.0 * std::numbers::pi * s); };
    // log g is convex in s, so the maximum sits at an end of the window.
    return p.sigma * p.strike * p.strike * std::max(g(lo), g(hi));
}

}  // namespace

TEST_CASE("space smooth fit at the benchmark") {
    const LimitEstimate e = space_fit_limit(bench_grid(), bench_boundary(), 0.5);
    CHECK(e.kind == "space");
    CHECK(e.target == -1.0);
    CHECK(std::abs(e.extrapolated + 1.0) <= 0.02);
    CHECK(e.estimates.size() == 4);
    for (double v : e.estimates) CHECK(std::isfinite(v));
}

TEST_CASE("space derivative deep in D and far out of the money") {
    const ValueGrid& g = bench_grid();
    const std::size_t i = g.row_of(0.5);
    CHECK(g.delta_at_row(i, 40.0) == doctest::Approx(-1.0).epsilon(1e-6));
    const double far = g.delta_at_row(i, 300.0);
    CHECK(far <= 0.0);
    CHECK(far > -0.05);
}

TEST_CASE("time smooth fit at the benchmark") {
    const TimeFitReport r = time_fit_limit(bench_grid(), bench_boundary(), 0.5);
    CHECK(r.sign_ok);
    CHECK(r.lipschitz_ok);
    CHECK(r.pass);
    CHECK(std::abs(r.limit.extrapolated) <= 0.02 * r.c);
    CHECK(r.tolerance == doctest::Approx(0.02 * r.c));
}

TEST_CASE("time derivative vanishes deep in D") {
    const ValueGrid& g = bench_grid();
    const std::size_t i = g.row_of(0.5);
    const double vt = (g.value_at_row(i + 1, 40.0) - g.value_at_row(i - 1, 40.0)) / (2.0 * g.dt());
    CHECK(std::abs(vt) <= g.fit_tol());
}

TEST_CASE("directional fit at five times") {
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const DirectionalFit d = directional_fit_check(bench_grid(), bench_boundary(), t);
        CHECK(d.d_side == -1.0);
        CHECK(d.gap <= 0.02);
        CHECK(d.pass);
    }
}

TEST_CASE("approach points that collide on the grid are rejected") {
    const ValueGrid coarse = price_put_fd(GbmParams{}, {100, 100});
    const Boundary b = extract_boundary(coarse);
    CHECK_THROWS_AS(space_fit_limit(coarse, b, 0.5, {8, 0.1}), ResolutionError);
    CHECK_THROWS_AS(space_fit_limit(bench_grid(), bench_boundary(), 1.0), InvalidInput);
    CHECK_THROWS_AS(space_fit_limit(bench_grid(), bench_boundary(), 0.5, {2, 0.1}), InvalidInput);
}

TEST_CASE("mc value of the extracted rule") {
    const GbmParams p;
    const Boundary& b = bench_boundary();
    const auto in_d = mc_value_estimate(b, p, {0.5, 60.0}, {1000, 1e-3, 1, true});
    CHECK(in_d.mean == doctest::Approx(40.0));
    CHECK(in_d.se == 0.0);

    const McControls mc{100000, 1e-3, 2, true};
    const double fd = bench_grid().value_at(0.0, 100.0);
    const auto est = mc_value_estimate(b, p, {0.0, 100.0}, mc);
    CHECK(std::abs(est.mean - fd) <= 3.0 * est.se);
    Boundary low = b;
    for (double& v : low.b) v -= 5.0;
    const auto worse = mc_value_estimate(low, p, {0.0, 100.0}, mc);
    CHECK(worse.mean < fd - 3.0 * worse.se);
}

TEST_CASE("lagrange identity: trivial cases and the benchmark point") {
    const ValueGrid& g = bench_grid();
    const Boundary& b = bench_boundary();
    const auto in_d = lagrange_check(g, b, {0.5, 60.0}, {1000, 1e-3, 1, true});
    CHECK(in_d.lhs == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(in_d.rhs == 0.0);
    CHECK(in_d.pass);

    const auto far = lagrange_check(g, b, {0.95, 300.0}, {2000, 1e-4, 1, true});
    CHECK(std::abs(far.lhs) < 1e-6);
    CHECK(std::abs(far.rhs) < 1e-6);

    const auto r = lagrange_check(g, b, {0.5, 110.0}, {20000, 1e-3, 3, true});
    CHECK(std::abs(r.z) <= 3.0);
    CHECK(r.se > 0.0);
    CHECK(r.z == doctest::Approx((r.lhs - r.rhs) / r.se));
}

TEST_CASE("continuation sampler respects the region and the exclusion band") {
    const GbmParams p;
    const auto pts = sample_continuation_points(bench_boundary(), p, 50, 3, 2.0);
    REQUIRE(pts.size() == 50);
    for (const auto& s : pts) {
        CHECK(s.t >= 0.0);
        CHECK(s.t <= 0.9);
        CHECK(s.x >= 1.02 * bench_boundary().at(s.t));
        CHECK(s.x <= 150.0);
        CHECK(std::abs(s.x - 100.0) >= 2.0);
    }
    CHECK(sample_continuation_points(bench_boundary(), p, 5, 3, 2.0).front().x == pts.front().x);
}

TEST_CASE("lipschitz constant matches its closed form") {
    const GbmParams p;
    const LipschitzConstant c = lipschitz_constant(p, 0.5, 1.0);
    CHECK(c.c == doctest::Approx(lipschitz_closed_form(p, 0.5)).epsilon(1e-6));
    CHECK(c.c == doctest::Approx(1591.78).epsilon(1e-5));
    CHECK(c.y_star == doctest::Approx((p.r - 1.5 * p.sigma * p.sigma) * c.s_star).epsilon(1e-4));
    const GbmParams hot{0.01, 0.5, 100.0, 10.0};
    for (double tau : {0.1, 0.5, 1.0, 4.0}) {
        const double got = lipschitz_constant(hot, 10.0 - tau, 10.0).c;
        CHECK(got > 0.0);
        CHECK(got == doctest::Approx(lipschitz_closed_form(hot, tau)).epsilon(1e-6));
    }
    // Shorter remaining horizon, larger constant at the benchmark.
    CHECK(lipschitz_constant(p, 0.875, 1.0).c >= lipschitz_constant(p, 0.5, 1.0).c);
}

TEST_CASE("lipschitz bound on the grid") {
    const LipschitzReport r = lipschitz_bound_check(bench_grid(), 0.5, {0.01, 0.02, 0.05});
    CHECK(r.violations == 0);
    CHECK(r.checks == 3 * bench_grid().cols());
    const LipschitzReport zero = lipschitz_bound_check(bench_grid(), 0.5, {0.0});
    CHECK(zero.violations == 0);
    CHECK(zero.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(lipschitz_bound_check(bench_grid(), 0.99, {0.05}), InvalidInput);
}

TEST_CASE("report writers") {
    std::vector<LimitEstimate> limits{space_fit_limit(bench_grid(), bench_boundary(), 0.5),
                                      time_fit_limit(bench_grid(), bench_boundary(), 0.5).limit};
    std::ostringstream csv, svg;
    write_smoothfit_csv(csv, limits);
    write_smoothfit_svg(svg, limits);
    CHECK(csv.str().rfind("t,kind,n,x_n,estimate,extrapolated,target,discrepancy\n", 0) == 0);
    CHECK(svg.str().find("<svg") != std::string::npos);
    CHECK(svg.str().find("href") == std::string::npos);
}
