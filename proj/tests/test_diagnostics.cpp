#include <cmath>
#include <set>
#include <sstream>

#include "bench_grid.hpp"
#include "doctest.h"
#include "optstop/diagnostics.hpp"
#include "optstop/errors.hpp"
#include "optstop/parallel.hpp"
#include "oracles.hpp"

using namespace optstop;

TEST_CASE("start inside D stops immediately") {
    const GbmParams p;
    const auto s = sample_entry_time(Boundary::flat(90.0, 1.0), p, {0.2, 85.0}, {1000, 1e-3, 1, true});
    CHECK(s.degenerate_start);
    for (const auto& path : s.paths) {
        REQUIRE(path.tau == 0.0);
        REQUIRE(path.hit);
    }
}

TEST_CASE("unreachable boundary is censored") {
    const GbmParams p;
    const auto s = sample_entry_time(bench_boundary(), p, {0.99, 400.0}, {20000, 1e-4, 2, true});
    CHECK(s.hit_fraction() == 0.0);
    for (const auto& path : s.paths) REQUIRE(path.tau == doctest::Approx(0.01));
}

TEST_CASE("flat boundary hit probability matches the reflection principle") {
    const GbmParams p;
    const std::size_t n = 40000;
    const auto s = sample_entry_time(Boundary::flat(90.0, 1.0), p, {0.0, 100.0}, {n, 1e-3, 3, true});
    const double expect = oracle::gbm_passage_prob(p, 100.0, 90.0, 1.0);
    const double se = std::sqrt(expect * (1.0 - expect) / n);
    CHECK(std::abs(s.hit_fraction() - expect) <= 3.0 * se);
    CHECK(expect == doctest::Approx(0.550799).epsilon(1e-3));
}

TEST_CASE("without the bridge correction discrete monitoring misses crossings") {
    const GbmParams p;
    const std::size_t n = 40000;
    const Boundary flat = Boundary::flat(90.0, 1.0);
    const auto on = sample_entry_time(flat, p, {0.0, 100.0}, {n, 1e-2, 3, true});
    const auto off = sample_entry_time(flat, p, {0.0, 100.0}, {n, 1e-2, 3, false});
    const double expect = oracle::gbm_passage_prob(p, 100.0, 90.0, 1.0);
    CHECK(off.hit_fraction() < expect - 0.02);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(on.paths[i].tau <= off.paths[i].tau);
}

TEST_CASE("censoring consistency and seed determinism") {
    const GbmParams p;
    const McControls mc{5000, 1e-3, 9, true};
    set_worker_count(1);
    const auto a = sample_entry_time(bench_boundary(), p, {0.3, 95.0}, mc);
    set_worker_count(4);
    const auto b = sample_entry_time(bench_boundary(), p, {0.3, 95.0}, mc);
    set_worker_count(0);
    CHECK(a.mean_tau().mean <= a.remaining);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        REQUIRE(a.paths[i].tau == b.paths[i].tau);
        REQUIRE(a.paths[i].x_tau == b.paths[i].x_tau);
        if (!a.paths[i].hit) REQUIRE(a.paths[i].tau == doctest::Approx(a.remaining));
        REQUIRE(a.paths[i].tau >= 0.0);
    }
    const auto pr = a.prob_tau_at_least(0.1);
    CHECK(pr.se == doctest::Approx(std::sqrt(pr.mean * (1.0 - pr.mean) / mc.n_paths)));
}

TEST_CASE("entry-time input validation") {
    const GbmParams p;
    CHECK_THROWS_AS(sample_entry_time(bench_boundary(), p, {1.0, 95.0}, {}), InvalidInput);
    CHECK_THROWS_AS(sample_entry_time(bench_boundary(), p, {0.5, 95.0}, {10, 0.1, 1, true}), InvalidInput);
    CHECK_THROWS_AS(sample_entry_time(bench_boundary(), p, {0.5, -1.0}, {}), InvalidInput);
}

TEST_CASE("green scan shape and monotonicity") {
    const GbmParams p;
    const ScanControls sc{6, 0.1, {0.001, 0.01, 0.05}};
    const RegularityScan s = green_scan(bench_boundary(), p, 0.5, sc, {20000, 1e-4, 5, true});
    REQUIRE(s.cells.size() == 18);
    CHECK(s.monotone_trend());
    CHECK(s.final_is_minimum());
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK(s.x_n[n] == doctest::Approx(s.b * (1.0 + 0.1 * std::pow(2.0, -double(n + 1)))));
        for (std::size_t e = 0; e + 1 < 3; ++e) CHECK(s.cell(n, e).p_hat >= s.cell(n, e + 1).p_hat);
        for (std::size_t e = 0; e < 3; ++e) {
            CHECK(s.cell(n, e).p_hat >= 0.0);
            CHECK(s.cell(n, e).p_hat <= 1.0);
        }
    }
    for (std::size_t e = 0; e < 3; ++e) {
        const auto& far = s.cell(0, e);
        const auto& near = s.cell(3, e);
        CHECK(far.p_hat > near.p_hat - 2.0 * std::hypot(far.se, near.se));
    }

    const RegularityScan one = green_scan(bench_boundary(), p, 0.5, {4, 0.1, {0.01}}, {2000, 1e-4, 5, true});
    CHECK(one.cells.size() == 4);
    std::ostringstream out;
    write_green_scan_csv(out, one);
    CHECK(out.str().rfind("n,x_n,eps,p_hat,se,mean_tau\n", 0) == 0);
    CHECK_THROWS_AS(green_scan(bench_boundary(), p, 1.0, sc, {}), InvalidInput);
}

TEST_CASE("green scan is stable under step refinement") {
    const GbmParams p;
    const ScanControls sc{4, 0.1, {0.01}};
    const auto coarse = green_scan(bench_boundary(), p, 0.5, sc, {20000, 2e-4, 6, true});
    const auto fine = green_scan(bench_boundary(), p, 0.5, sc, {20000, 1e-4, 6, true});
    for (std::size_t n = 0; n < 4; ++n) {
        const auto& a = coarse.cell(n, 0);
        const auto& b = fine.cell(n, 0);
        CHECK(std::abs(a.p_hat - b.p_hat) <= 3.0 * std::hypot(a.se, b.se));
    }
}

TEST_CASE("stable boundary: zero margin, verdict, and monotonicity precondition") {
    const GbmParams p;
    const McControls mc{20000, 1e-4, 7, true};
    const auto same = stable_boundary_check(bench_boundary(), p, 0.5, mc, 0.0);
    CHECK(same.max_difference == 0.0);
    CHECK(same.fraction_over_eps0 == 0.0);
    const auto rep = stable_boundary_check(bench_boundary(), p, 0.5, mc);
    CHECK(rep.pass);
    CHECK(rep.delta == doctest::Approx(bridge_resolution(p, rep.b, 1e-4)));

    Boundary reversed = bench_boundary();
    std::reverse(reversed.b.begin(), reversed.b.end());
    CHECK_THROWS_AS(stable_boundary_check(reversed, p, 0.5, mc), InvalidInput);
}
