#include <algorithm>
#include <cmath>

#include "optstop/errors.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {
namespace {

struct Window {
    std::size_t i_lo, i_hi, j_lo, j_hi;
};

Window resolve(const ValueGrid& grid, const ResidualWindow& w) {
    const std::size_t gap = std::max<std::size_t>(w.boundary_gap, 2);
    Window out{gap, grid.rows() - 1 - gap, gap, grid.cols() - 1 - gap};
    const auto& t = grid.t_grid();
    const auto& x = grid.x_grid();
    if (w.t_lo >= 0.0) while (out.i_lo <= out.i_hi && t[out.i_lo] < w.t_lo) ++out.i_lo;
    if (w.t_hi >= 0.0) while (out.i_hi >= out.i_lo && t[out.i_hi] > w.t_hi) --out.i_hi;
    if (w.x_lo >= 0.0) while (out.j_lo <= out.j_hi && x[out.j_lo] < w.x_lo) ++out.j_lo;
    if (w.x_hi >= 0.0) while (out.j_hi >= out.j_lo && x[out.j_hi] > w.x_hi) --out.j_hi;
    return out;
}

// Largest / smallest boundary level over rows i-2..i+2.
double local_b_max(const Boundary& b, std::size_t i) {
    return std::max({b.b[i - 2], b.b[i - 1], b.b[i], b.b[i + 1], b.b[i + 2]});
}
double local_b_min(const Boundary& b, std::size_t i) {
    return std::min({b.b[i - 2], b.b[i - 1], b.b[i], b.b[i + 1], b.b[i + 2]});
}

}  // namespace

ResidualReport generator_residual(const ValueGrid& grid, const Boundary& boundary,
                                  const ResidualWindow& window) {
    if (boundary.b.size() != grid.rows()) {
        throw InvalidInput("generator_residual: boundary does not match grid rows");
    }
    const Window w = resolve(grid, window);
    const auto& p = grid.params();
    const auto& x = grid.x_grid();
    const double dy = grid.dlogx();
    const double dt = grid.dt();
    const double s2 = p.sigma * p.sigma;
    const double gap_factor = std::exp(static_cast<double>(std::max<std::size_t>(window.boundary_gap, 2)) * dy);

    ResidualReport rep;
    double sum = 0.0;
    double ex_sum = 0.0;
    for (std::size_t i = w.i_lo; i <= w.i_hi && w.i_lo <= w.i_hi; ++i) {
        const double c_edge = local_b_max(boundary, i) * gap_factor;
        const double d_edge = local_b_min(boundary, i) / gap_factor;
        for (std::size_t j = w.j_lo; j <= w.j_hi && w.j_lo <= w.j_hi; ++j) {
            const bool in_c = x[j] >= c_edge;
            const bool in_d = x[j] <= d_edge;
            if (!in_c && !in_d) continue;
            const double v = grid.value(i, j);
            const double vt = (grid.value(i + 1, j) - grid.value(i - 1, j)) / (2.0 * dt);
            const double vy = (grid.value(i, j + 1) - grid.value(i, j - 1)) / (2.0 * dy);
            const double vyy = (grid.value(i, j + 1) - 2.0 * v + grid.value(i, j - 1)) / (dy * dy);
            const double res = vt + p.r * vy + 0.5 * s2 * (vyy - vy) - p.r * v;
            if (in_c) {
                rep.max_abs = std::max(rep.max_abs, std::abs(res));
                sum += std::abs(res);
                ++rep.nodes;
            } else {
                ex_sum += res;
                ++rep.exercise_nodes;
            }
        }
    }
    if (rep.nodes == 0) throw DiagnosticError("generator_residual: no qualifying continuation nodes");
    rep.mean_abs = sum / static_cast<double>(rep.nodes);
    if (rep.exercise_nodes > 0) rep.exercise_mean = ex_sum / static_cast<double>(rep.exercise_nodes);
    return rep;
}

double truncation_estimate(const ValueGrid& grid, const Boundary& boundary,
                           const ResidualWindow& window) {
    if (boundary.b.size() != grid.rows()) {
        throw InvalidInput("truncation_estimate: boundary does not match grid rows");
    }
    const Window w = resolve(grid, window);
    const auto& p = grid.params();
    const auto& x = grid.x_grid();
    const double dy = grid.dlogx();
    const double dt = grid.dt();
    const double s2 = p.sigma * p.sigma;
    const double nu = p.r - 0.5 * s2;
    const double gap_factor = std::exp(static_cast<double>(std::max<std::size_t>(window.boundary_gap, 2)) * dy);

    double worst = 0.0;
    bool any = false;
    for (std::size_t i = w.i_lo; i <= w.i_hi && w.i_lo <= w.i_hi; ++i) {
        const double c_edge = local_b_max(boundary, i) * gap_factor;
        for (std::size_t j = w.j_lo; j <= w.j_hi && w.j_lo <= w.j_hi; ++j) {
            if (x[j] < c_edge) continue;
            auto v = [&](std::ptrdiff_t di, std::ptrdiff_t dj) {
                return grid.value(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + di),
                                  static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + dj));
            };
            const double vttt = (v(2, 0) - 2.0 * v(1, 0) + 2.0 * v(-1, 0) - v(-2, 0)) / (2.0 * dt * dt * dt);
            const double vyyy = (v(0, 2) - 2.0 * v(0, 1) + 2.0 * v(0, -1) - v(0, -2)) / (2.0 * dy * dy * dy);
            const double vyyyy =
                (v(0, 2) - 4.0 * v(0, 1) + 6.0 * v(0, 0) - 4.0 * v(0, -1) + v(0, -2)) / (dy * dy * dy * dy);
            const double est = dt * dt / 6.0 * std::abs(vttt) + std::abs(nu) * dy * dy / 6.0 * std::abs(vyyy) +
                               0.5 * s2 * dy * dy / 12.0 * std::abs(vyyyy);
            worst = std::max(worst, est);
            any = true;
        }
    }
    if (!any) throw DiagnosticError("truncation_estimate: no qualifying continuation nodes");
    return worst;
}

}  // namespace optstop
