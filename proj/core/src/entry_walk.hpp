#pragma once

// Log-space GBM walker shared by the entry-time, value and Lagrange estimators.

#include <cmath>
#include <cstdint>
#include <vector>

#include "optstop/diagnostics.hpp"
#include "optstop/errors.hpp"
#include "optstop/rng.hpp"

namespace optstop::detail {

struct WalkSetup {
    double y0 = 0.0;              // log of the start state
    double h = 0.0;               // step
    double drift = 0.0;           // (r - sigma^2/2) h
    double vol_step = 0.0;        // sigma sqrt(h)
    double bridge_scale = 0.0;    // 2 / (sigma^2 h)
    std::vector<double> log_level;// log boundary at s_k = k h, k = 0..n
    bool bridge = true;
    bool exclude_start = false;

    std::size_t steps() const { return log_level.size() - 1; }
};

struct WalkResult {
    double tau = 0.0;
    double y_tau = 0.0;
    bool hit = false;
    bool bridged = false;
};

struct NoVisit {
    void interval(std::size_t, double, double) const {}
};

WalkSetup make_walk(const Boundary& boundary, const GbmParams& params, StartPoint start,
                    double dt, bool bridge, const EntryOptions& options);

/// Walks one path; visitor.interval(k, y_k, fraction) is called for every
/// monitoring interval before the stop, the last one possibly partial.
template <typename Visitor>
WalkResult walk_path(const WalkSetup& w, std::uint64_t seed, std::size_t path, Visitor& visit) {
    WalkResult res;
    double y = w.y0;
    double d1 = y - w.log_level[0];
    if (!w.exclude_start && d1 <= 0.0) {
        res.hit = true;
        res.y_tau = y;
        return res;
    }
    CounterRng normals(derive_seed(seed, path, 0));
    CounterRng uniforms(derive_seed(seed, path, 1));
    const std::size_t n = w.steps();
    for (std::size_t k = 0; k < n; ++k) {
        const double y_next = y + w.drift + w.vol_step * normals.normal();
        const double d2 = y_next - w.log_level[k + 1];
        double frac = -1.0;
        if (d1 <= 0.0) {
            // Started on or below the level with t = 0 excluded: the bridge
            // from a nonpositive distance crosses at once.
            if (w.bridge) {
                frac = 0.0;
                res.bridged = d2 > 0.0;
            } else if (d2 <= 0.0) {
                frac = 1.0;
            }
        } else if (d2 <= 0.0) {
            frac = d1 / (d1 - d2);
        } else if (w.bridge) {
            const double a = w.bridge_scale * d1 * d2;
            if (a < 40.0 && uniforms.uniform() < std::exp(-a)) {
                frac = d1 / (d1 + d2);
                res.bridged = true;
            }
        }
        if (frac >= 0.0) {
            visit.interval(k, y, frac);
            res.hit = true;
            res.tau = (static_cast<double>(k) + frac) * w.h;
            res.y_tau = w.log_level[k] + frac * (w.log_level[k + 1] - w.log_level[k]);
            if (d1 <= 0.0 && !w.bridge) res.y_tau = y_next;
            return res;
        }
        visit.interval(k, y, 1.0);
        y = y_next;
        d1 = d2;
    }
    res.tau = static_cast<double>(n) * w.h;
    res.y_tau = y;
    return res;
}

}  // namespace optstop::detail
