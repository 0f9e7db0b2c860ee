#include <algorithm>
#include <cmath>
#include <numbers>

#include "optstop/errors.hpp"
#include "optstop/smoothfit.hpp"

namespace optstop {
namespace {

constexpr std::size_t kGrid = 401;

struct LogIntegrand {
    double drift;  // r - sigma^2 / 2
    double sigma;
    double operator()(double s, double y) const {
        const double z = (y - drift * s) / (sigma * std::sqrt(s));
        return -y - 0.5 * std::log(s) - 0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
    }
};

}  // namespace

LipschitzConstant lipschitz_constant(const GbmParams& params, double t, double horizon) {
    params.validate();
    if (!(t < horizon)) throw InvalidInput("lipschitz_constant: needs t < T");
    const double tau = horizon - t;
    const double s_lo = 0.5 * tau;
    const double s_hi = 2.0 * tau;
    const LogIntegrand f{params.r - 0.5 * params.sigma * params.sigma, params.sigma};

    double half_width = 10.0 * params.sigma * std::sqrt(2.0 * tau);
    double best = -INFINITY, s_best = s_lo, y_best = 0.0;
    double y_lo = 0.0, y_hi = 0.0;
    bool interior = false;
    for (int widen = 0; widen < 8 && !interior; ++widen, half_width *= 2.0) {
        y_lo = std::min(f.drift * s_lo, f.drift * s_hi) - half_width;
        y_hi = std::max(f.drift * s_lo, f.drift * s_hi) + half_width;
        best = -INFINITY;
        std::size_t jy_best = 0;
        for (std::size_t is = 0; is < kGrid; ++is) {
            const double s = s_lo + (s_hi - s_lo) * static_cast<double>(is) / (kGrid - 1);
            for (std::size_t jy = 0; jy < kGrid; ++jy) {
                const double y = y_lo + (y_hi - y_lo) * static_cast<double>(jy) / (kGrid - 1);
                const double v = f(s, y);
                if (v > best) {
                    best = v;
                    s_best = s;
                    y_best = y;
                    jy_best = jy;
                }
            }
        }
        interior = jy_best > 0 && jy_best + 1 < kGrid;
    }
    if (!interior) throw NumericalError("lipschitz_constant: supremum in y not bracketed by the search window");

    // Coordinate refinement inside the neighbouring grid cells.
    double ds = (s_hi - s_lo) / (kGrid - 1);
    double dy = (y_hi - y_lo) / (kGrid - 1);
    for (int sweep = 0; sweep < 100; ++sweep) {
        const double before = best;
        s_best = golden_section_max([&](double s) { return f(s, y_best); }, std::max(s_lo, s_best - ds),
                                    std::min(s_hi, s_best + ds), 1e-14);
        y_best = golden_section_max([&](double y) { return f(s_best, y); }, y_best - dy, y_best + dy, 1e-14);
        best = std::max(best, f(s_best, y_best));
        ds *= 0.5;
        dy *= 0.5;
        // best is a log value; a change of 1e-7 is a relative change of 1e-7 in c.
        if (std::abs(best - before) < 1e-7 && sweep > 2) break;
    }

    LipschitzConstant out;
    out.c = params.sigma * params.strike * params.strike * std::exp(best);
    out.s_star = s_best;
    out.y_star = y_best;
    return out;
}

LipschitzReport lipschitz_bound_check(const ValueGrid& grid, double t, const std::vector<double>& eps_list) {
    const GbmParams& p = grid.params();
    if (eps_list.empty()) throw InvalidInput("lipschitz_bound_check: eps_list is empty");
    const double max_eps = *std::max_element(eps_list.begin(), eps_list.end());
    const double min_eps = *std::min_element(eps_list.begin(), eps_list.end());
    if (min_eps < 0.0) throw InvalidInput("lipschitz_bound_check: eps must be nonnegative");
    if (t < 0.0 || t + max_eps > p.horizon * (1.0 + 1e-12)) {
        throw InvalidInput("lipschitz_bound_check: needs 0 <= t and t + max(eps) <= T");
    }

    LipschitzReport rep;
    rep.t = t;
    rep.c = lipschitz_constant(p, t, p.horizon).c;
    const double dt_rel = grid.dt() / p.horizon;
    rep.slack = 10.0 * (dt_rel * dt_rel + grid.dlogx() * grid.dlogx());
    rep.worst_margin = INFINITY;
    for (std::size_t j = 0; j < grid.cols(); ++j) {
        const double x = grid.x_grid()[j];
        const double v0 = grid.value_at(t, x);
        for (double eps : eps_list) {
            const double increment = grid.value_at(std::min(t + eps, p.horizon), x) - v0;
            const double margin = increment + rep.c * eps * (1.0 + rep.slack);
            rep.worst_margin = std::min(rep.worst_margin, margin);
            if (margin < 0.0) ++rep.violations;
            ++rep.checks;
        }
    }
    return rep;
}

}  // namespace optstop
