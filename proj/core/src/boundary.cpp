#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "optstop/errors.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {

double Boundary::at(double t) const {
    if (t_grid.empty()) throw InvalidInput("Boundary: empty");
    if (t <= t_grid.front()) return b.front();
    if (t >= t_grid.back()) return b.back();
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    const auto i = static_cast<std::size_t>(it - t_grid.begin()) - 1;
    const double w = (t - t_grid[i]) / (t_grid[i + 1] - t_grid[i]);
    return (1.0 - w) * b[i] + w * b[i + 1];
}

bool Boundary::nondecreasing() const {
    return std::adjacent_find(b.begin(), b.end(), std::greater<>()) == b.end();
}

Boundary Boundary::flat(double level, double horizon) {
    Boundary out;
    out.t_grid = {0.0, horizon};
    out.b = {level, level};
    return out;
}

Boundary extract_boundary(const ValueGrid& grid, std::optional<double> fit_tol) {
    const double tol = fit_tol.value_or(grid.fit_tol());
    if (tol < grid.config().psor_tol) {
        throw InvalidInput("extract_boundary: fit_tol must be at least psor_tol");
    }
    const double k = grid.params().strike;
    const auto& x = grid.x_grid();
    const std::size_t last_row = grid.rows() - 1;

    Boundary out;
    out.t_grid = grid.t_grid();
    out.b.resize(grid.rows());
    {
        const std::size_t jk = grid.cell_of(k);
        out.cell_width_at_strike = x[jk + 1] - x[jk];
    }

    for (std::size_t i = 0; i < grid.rows(); ++i) {
        // Largest in-the-money node with V - G <= tol (D is closed).
        std::size_t top = 0;
        bool found = false;
        for (std::size_t j = 0; j < grid.cols() && x[j] < k; ++j) {
            if (grid.value(i, j) - grid.gain(j) <= tol) {
                top = j;
                found = true;
            }
        }
        if (!found) {
            if (i < last_row) {
                throw ExtractionError("extract_boundary: empty exercise region at t = " +
                                      std::to_string(out.t_grid[i]) +
                                      " (grid too coarse or x_min too high)");
            }
            out.b[i] = k;
            continue;
        }
        const double d0 = grid.value(i, top) - grid.gain(top);
        const double d1 = grid.value(i, top + 1) - grid.gain(top + 1);
        if (d1 <= tol) {
            // Next node is out of the money and still on the obstacle: D reaches K.
            out.b[i] = std::min(k, x[top + 1]);
        } else {
            const double w = std::clamp((tol - d0) / (d1 - d0), 0.0, 1.0);
            out.b[i] = x[top] + w * (x[top + 1] - x[top]);
        }
    }

    for (std::size_t i = 0; i + 1 < out.b.size(); ++i) {
        const double drop = out.b[i] - out.b[i + 1];
        if (drop > out.max_violation) {
            out.max_violation = drop;
            const std::size_t j = grid.cell_of(out.b[i]);
            out.max_violation_cells = drop / (x[j + 1] - x[j]);
        }
    }
    for (std::size_t i = 1; i < out.b.size(); ++i) out.b[i] = std::max(out.b[i], out.b[i - 1]);
    return out;
}

void write_value_csv(std::ostream& out, const ValueGrid& grid, std::size_t t_stride,
                     std::size_t x_stride) {
    t_stride = std::max<std::size_t>(1, t_stride);
    x_stride = std::max<std::size_t>(1, x_stride);
    const auto prec = out.precision(12);
    out << "t,x,V,exercise\n";
    auto rows_to_write = [&](std::size_t count, std::size_t stride, auto&& fn) {
        for (std::size_t i = 0; i < count; i += stride) fn(i);
        if ((count - 1) % stride != 0) fn(count - 1);
    };
    rows_to_write(grid.rows(), t_stride, [&](std::size_t i) {
        rows_to_write(grid.cols(), x_stride, [&](std::size_t j) {
            out << grid.t_grid()[i] << ',' << grid.x_grid()[j] << ',' << grid.value(i, j) << ','
                << (grid.exercise(i, j) ? 1 : 0) << '\n';
        });
    });
    out.precision(prec);
}

void write_boundary_csv(std::ostream& out, const Boundary& boundary) {
    const auto prec = out.precision(12);
    out << "t,b\n";
    for (std::size_t i = 0; i < boundary.b.size(); ++i) {
        out << boundary.t_grid[i] << ',' << boundary.b[i] << '\n';
    }
    out.precision(prec);
}

}  // namespace optstop
