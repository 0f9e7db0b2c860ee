#include <cmath>
#include <sstream>
#include <string>

#include "bench_grid.hpp"
#include "doctest.h"
#include "optstop/errors.hpp"
#include "optstop/putsolver.hpp"
#include "optstop/rng.hpp"

using namespace optstop;

TEST_CASE("terminal row is the payoff and the obstacle holds") {
    const ValueGrid& g = bench_grid();
    const std::size_t last = g.rows() - 1;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j) {
        REQUIRE(g.value(last, j) == g.gain(j));
        for (std::size_t i = 0; i < g.rows(); ++i) worst = std::min(worst, g.value(i, j) - g.gain(j));
    }
    CHECK(worst >= -g.fit_tol());
}

TEST_CASE("value is nonincreasing in t and convex in x") {
    const ValueGrid& g = bench_grid();
    const auto& x = g.x_grid();
    for (std::size_t i = 0; i + 1 < g.rows(); i += 7) {
        for (std::size_t j = 1; j + 1 < g.cols(); ++j) {
            REQUIRE(g.value(i, j) >= g.value(i + 1, j) - g.fit_tol());
            const double left = (g.value(i, j) - g.value(i, j - 1)) / (x[j] - x[j - 1]);
            const double right = (g.value(i, j + 1) - g.value(i, j)) / (x[j + 1] - x[j]);
            REQUIRE(right - left >= -g.fit_tol());
        }
    }
}

TEST_CASE("fd price agrees with a deep binomial tree") {
    const ValueGrid& g = bench_grid();
    const GbmParams p;
    for (double x : {80.0, 100.0, 120.0}) {
        const double tree = price_put_binomial(p, x, 4000);
        CHECK(std::abs(g.value_at(0.0, x) - tree) / tree <= 1e-3);
    }
    // Frozen reference values from a 10000-step tree.
    CHECK(g.value_at(0.0, 100.0) == doctest::Approx(6.0903).epsilon(1e-3));
}

TEST_CASE("american and european puts coincide at r = 0") {
    const GbmParams p{0.0, 0.3, 100.0, 1.0};
    const ValueGrid g = price_put_fd(p, {500, 1000});
    for (double x : {60.0, 90.0, 100.0, 130.0}) {
        CHECK(g.value_at(0.0, x) == doctest::Approx(european_put(p, x, 1.0)).epsilon(1e-3));
    }
}

TEST_CASE("american put dominates the european put") {
    const ValueGrid& g = bench_grid();
    const GbmParams p;
    for (double x : {70.0, 90.0, 100.0, 110.0, 150.0}) {
        CHECK(g.value_at(0.0, x) >= european_put(p, x, 1.0) - 1e-3);
    }
}

TEST_CASE("binomial tree limits and self-convergence") {
    const GbmParams p;
    CHECK(price_put_binomial(p, 20.0, 1) == doctest::Approx(80.0));
    CHECK(price_put_binomial(GbmParams{0.05, 0.01, 100.0, 1.0}, 130.0, 200) == 0.0);
    double prev_gap = 1e9;
    for (std::size_t n : {500u, 1000u, 2000u, 4000u}) {
        const double gap = std::abs(price_put_binomial(p, 100.0, 2 * n) - price_put_binomial(p, 100.0, n));
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK_THROWS_AS(price_put_binomial(p, 100.0, 0), InvalidInput);
}

TEST_CASE("boundary is increasing and ends at the strike") {
    const ValueGrid& g = bench_grid();
    const Boundary& b = bench_boundary();
    CHECK(b.nondecreasing());
    CHECK(b.max_violation_cells <= 1.0);
    CHECK(std::abs(b.b.back() - 100.0) <= b.cell_width_at_strike);
    CHECK(b.b.front() > 0.0);
    CHECK(b.b.front() < 100.0);
    CHECK(b.t_grid.size() == g.rows());
}

TEST_CASE("boundary start agrees with the binomial frontier") {
    const GbmParams p;
    const auto frontier = put_binomial_frontier(p, 100.0, 10000);
    REQUIRE_FALSE(frontier.empty());
    const Boundary& b = bench_boundary();
    const double cell = bench_grid().x_grid()[1] / bench_grid().x_grid()[0];
    const double width = b.b.front() * (cell - 1.0);
    CHECK(std::abs(frontier.front().b - b.b.front()) <= 2.0 * width);
    for (std::size_t i = 1; i < frontier.size(); ++i) REQUIRE(frontier[i].t > frontier[i - 1].t);
}

TEST_CASE("perpetual put closed form") {
    const GbmParams p{0.05, 0.2, 100.0, std::numeric_limits<double>::infinity()};
    const PerpetualPut pp = perpetual_put(p);
    CHECK(pp.b_star == doctest::Approx(71.4285714285714).epsilon(1e-12));
    CHECK(pp.derivative(pp.b_star) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(pp.value(50.0) == doctest::Approx(50.0));
    CHECK(pp.value(pp.b_star) == doctest::Approx(100.0 - pp.b_star));
    CounterRng rng(derive_seed(4, 0));
    for (int i = 0; i < 20; ++i) {
        const double x = pp.b_star + rng.uniform() * (400.0 - pp.b_star);
        const double y = threshold_argmax(p, x);
        CHECK(std::abs(threshold_value(p, y, x) - pp.value(x)) <= 1e-8 * pp.value(x));
    }
    CHECK_THROWS_AS(perpetual_put(GbmParams{0.0, 0.2, 100.0, p.horizon}), InvalidInput);
}

TEST_CASE("generator residual: small in C, -rK in D, second order") {
    const GbmParams p;
    const ResidualWindow far{0.0, 0.9, 300.0, 380.0};
    const ValueGrid& fine = bench_grid();
    const Boundary& bf = bench_boundary();
    const ResidualReport r = generator_residual(fine, bf, far);
    CHECK(r.max_abs <= 10.0 * truncation_estimate(fine, bf, far));

    const ResidualReport all = generator_residual(fine, bf);
    CHECK(all.exercise_nodes > 0);
    CHECK(all.exercise_mean == doctest::Approx(-p.r * p.strike).epsilon(1e-6));

    const ResidualWindow mid{0.2, 0.8, 110.0, 200.0};
    const ValueGrid coarse = price_put_fd(p, {250, 500});
    const ValueGrid finer = price_put_fd(p, {500, 1000});
    const double rc = generator_residual(coarse, extract_boundary(coarse), mid).max_abs;
    const double rf = generator_residual(finer, extract_boundary(finer), mid).max_abs;
    CHECK(rc / rf > 3.0);
    CHECK(rc / rf < 5.0);
}

TEST_CASE("solver input validation") {
    const GbmParams p;
    CHECK_THROWS_AS(price_put_fd(p, {10, 1000}), InvalidInput);
    GridConfig bad;
    bad.omega = 2.0;
    CHECK_THROWS_AS(price_put_fd(p, bad), InvalidInput);
    bad = {};
    bad.x_max = 90.0;
    CHECK_THROWS_AS(price_put_fd(p, bad), InvalidInput);
    GridConfig tight{100, 200};
    tight.max_iter = 1;
    CHECK_THROWS_AS(price_put_fd(p, tight), SolverError);
    CHECK_THROWS_AS(price_put_fd(GbmParams{0.05, 0.2, 100.0, std::numeric_limits<double>::infinity()}), InvalidInput);
}

TEST_CASE("csv headers") {
    const ValueGrid g = price_put_fd(GbmParams{}, {100, 100});
    std::ostringstream v, b;
    write_value_csv(v, g);
    write_boundary_csv(b, extract_boundary(g));
    CHECK(v.str().rfind("t,x,V,exercise\n", 0) == 0);
    CHECK(b.str().rfind("t,b\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : v.str()) lines += c == '\n';
    CHECK(lines == 1 + g.rows() * g.cols());
}
