#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "optstop/flowsim.hpp"

namespace optstop {

/// General stopping problem sup_tau E[e^{-Lambda_tau} G(X_tau) + int e^{-Lambda_s} H(X_s) ds]
/// with Lambda_t = int_0^t lambda(X_s) ds. The solvers in this module handle
/// its American put instance.
struct ProblemSpec {
    std::function<double(double, double)> gain;     ///< G(t, x)
    std::function<double(double, double)> running;  ///< H(t, x)
    std::function<double(double, double)> discount; ///< lambda(t, x) >= 0
    GbmParams dynamics;

    static ProblemSpec american_put(const GbmParams& params);
};

inline double put_payoff(double strike, double x) { return x < strike ? strike - x : 0.0; }

/// Discretization and solver controls for price_put_fd. Zero-valued bounds and
/// tolerances are replaced by their strike-relative defaults.
struct GridConfig {
    std::size_t time_steps = 1000;    ///< M
    std::size_t space_cells = 2000;   ///< N (log-uniform cells)
    double x_min = 0.0;               ///< default K / 50
    double x_max = 0.0;               ///< default 4 K
    double fit_tol = 0.0;             ///< default 1e-6 K
    double psor_tol = 0.0;            ///< default 1e-8 K
    std::size_t max_iter = 10000;
    double omega = 1.3;               ///< PSOR relaxation factor in (0, 2)
    std::size_t rannacher_steps = 2;  ///< fully implicit start-up steps

    GridConfig resolved(const GbmParams& params) const;
};

/// Solved value function on a rectangular (t, x) grid, x log-spaced.
class ValueGrid {
public:
    ValueGrid(GbmParams params, GridConfig config, std::vector<double> t_grid,
              std::vector<double> x_grid, std::vector<double> values);

    const GbmParams& params() const noexcept { return params_; }
    const GridConfig& config() const noexcept { return config_; }
    const std::vector<double>& t_grid() const noexcept { return t_; }
    const std::vector<double>& x_grid() const noexcept { return x_; }
    std::size_t rows() const noexcept { return t_.size(); }
    std::size_t cols() const noexcept { return x_.size(); }
    double dt() const noexcept { return t_[1] - t_[0]; }
    double dlogx() const noexcept { return dlogx_; }
    double fit_tol() const noexcept { return config_.fit_tol; }

    double value(std::size_t i, std::size_t j) const { return v_[i * x_.size() + j]; }
    double gain(std::size_t j) const { return put_payoff(params_.strike, x_[j]); }
    /// Membership in the (closed) exercise set D: V - G <= fit_tol.
    bool exercise(std::size_t i, std::size_t j) const {
        return value(i, j) - gain(j) <= config_.fit_tol;
    }

    /// Cell index j with x_j <= x < x_{j+1}, clamped to the grid.
    std::size_t cell_of(double x) const;
    /// Row index of the grid time closest to t.
    std::size_t row_of(double t) const;

    /// Linear interpolation in x along row i.
    double value_at_row(std::size_t i, double x) const;
    /// Bilinear interpolation in (t, x).
    double value_at(double t, double x) const;
    /// dV/dx along row i at x: central differences in log x at the bracketing
    /// nodes, interpolated linearly.
    double delta_at_row(std::size_t i, double x) const;

private:
    GbmParams params_;
    GridConfig config_;
    std::vector<double> t_;
    std::vector<double> x_;
    std::vector<double> v_;
    double log_x0_ = 0.0;
    double dlogx_ = 0.0;
};

/// Optimal stopping boundary t -> b(t), piecewise linear between samples.
struct Boundary {
    std::vector<double> t_grid;
    std::vector<double> b;
    double max_violation = 0.0;        ///< largest pre-projection decrease b_i - b_{i+1}
    double max_violation_cells = 0.0;  ///< same, in units of the local x cell
    double cell_width_at_strike = 0.0; ///< x-grid spacing next to K (0 if not from a grid)

    double at(double t) const;
    bool nondecreasing() const;
    static Boundary flat(double level, double horizon);
};

/// American put by Crank-Nicolson + projected SOR in log-price, backward from
/// V(T, x) = (K - x)^+. Throws SolverError on PSOR non-convergence.
ValueGrid price_put_fd(const GbmParams& params, const GridConfig& config = {});

/// Black-Scholes European put.
double european_put(const GbmParams& params, double x, double time_to_maturity);

/// CRR binomial American put at t = 0.
double price_put_binomial(const GbmParams& params, double x0, std::size_t n_levels);

struct FrontierPoint {
    double t;
    double b;
};

/// Early-exercise frontier of the CRR tree: for every step with both an
/// exercising and a continuing node, the highest exercising node price.
std::vector<FrontierPoint> put_binomial_frontier(const GbmParams& params, double x0,
                                                 std::size_t n_levels);

/// Perpetual put: closed-form threshold and value function.
struct PerpetualPut {
    double strike;
    double b_star;
    double exponent;  ///< 2r / sigma^2

    double value(double x) const;
    /// Right derivative of the value function.
    double derivative(double x) const;
};

/// Throws InvalidInput for r <= 0. The closed form is cross-checked against
/// the golden-section threshold maximum before being returned.
PerpetualPut perpetual_put(const GbmParams& params);

/// Stopping value of the threshold rule "stop at first passage below y",
/// (K - y) (x / y)^{-2r/sigma^2}, for y <= x.
double threshold_value(const GbmParams& params, double y, double x);

/// argmax_y threshold_value(y; x) over (0, min(x, K)] by golden section.
double threshold_argmax(const GbmParams& params, double x);

/// b(t_i) = largest in-the-money x_j in the closed exercise set, refined by
/// linear interpolation of V - G between x_j and x_{j+1}; then made
/// nondecreasing by a running-max scan. Throws ExtractionError if some t_i < T
/// has an empty exercise set.
Boundary extract_boundary(const ValueGrid& grid, std::optional<double> fit_tol = std::nullopt);

/// Region restriction for generator_residual; unset bounds keep the full grid.
struct ResidualWindow {
    double t_lo = -1.0;
    double t_hi = -1.0;
    double x_lo = -1.0;
    double x_hi = -1.0;
    std::size_t boundary_gap = 2;  ///< cells kept clear of b(t) and of the grid edges
};

struct ResidualReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    std::size_t nodes = 0;
    /// Generator applied to V on interior exercise nodes; equals -rK for V = K - x.
    double exercise_mean = 0.0;
    std::size_t exercise_nodes = 0;
};

/// V_t + r x V_x + sigma^2 x^2 V_xx / 2 - r V on continuation nodes, central
/// differences. Throws DiagnosticError when no node qualifies.
ResidualReport generator_residual(const ValueGrid& grid, const Boundary& boundary,
                                  const ResidualWindow& window = {});

/// Local truncation scale of the scheme inside `window`: the leading
/// dt^2 and dlogx^2 terms estimated by higher differences of V.
double truncation_estimate(const ValueGrid& grid, const Boundary& boundary,
                           const ResidualWindow& window = {});

void write_value_csv(std::ostream& out, const ValueGrid& grid, std::size_t t_stride = 1,
                     std::size_t x_stride = 1);
void write_boundary_csv(std::ostream& out, const Boundary& boundary);

}  // namespace optstop
