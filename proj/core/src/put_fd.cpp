#include <algorithm>
#include <cmath>
#include <string>

#include "optstop/errors.hpp"
#include "optstop/numerics.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {

ProblemSpec ProblemSpec::american_put(const GbmParams& params) {
    params.validate();
    const double k = params.strike;
    const double r = params.r;
    return ProblemSpec{
        [k](double, double x) { return put_payoff(k, x); },
        [](double, double) { return 0.0; },
        [r](double, double) { return r; },
        params,
    };
}

GridConfig GridConfig::resolved(const GbmParams& params) const {
    GridConfig c = *this;
    const double k = params.strike;
    if (c.x_min <= 0.0) c.x_min = k / 50.0;
    if (c.x_max <= 0.0) c.x_max = 4.0 * k;
    if (c.fit_tol <= 0.0) c.fit_tol = 1e-6 * k;
    if (c.psor_tol <= 0.0) c.psor_tol = 1e-8 * k;
    return c;
}

ValueGrid::ValueGrid(GbmParams params, GridConfig config, std::vector<double> t_grid,
                     std::vector<double> x_grid, std::vector<double> values)
    : params_(params),
      config_(config),
      t_(std::move(t_grid)),
      x_(std::move(x_grid)),
      v_(std::move(values)) {
    if (t_.size() < 2 || x_.size() < 3 || v_.size() != t_.size() * x_.size()) {
        throw InvalidInput("ValueGrid: inconsistent grid dimensions");
    }
    log_x0_ = std::log(x_.front());
    dlogx_ = (std::log(x_.back()) - log_x0_) / static_cast<double>(x_.size() - 1);
}

std::size_t ValueGrid::cell_of(double x) const {
    const double pos = (std::log(x) - log_x0_) / dlogx_;
    if (!(pos > 0.0)) return 0;
    const auto j = static_cast<std::size_t>(pos);
    return std::min(j, x_.size() - 2);
}

std::size_t ValueGrid::row_of(double t) const {
    const double pos = (t - t_.front()) / dt();
    if (!(pos > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(std::lround(pos)), t_.size() - 1);
}

double ValueGrid::value_at_row(std::size_t i, double x) const {
    // Linear in x, so the obstacle K - x is reproduced exactly inside D.
    const std::size_t j = cell_of(x);
    const double w = std::clamp((x - x_[j]) / (x_[j + 1] - x_[j]), 0.0, 1.0);
    return (1.0 - w) * value(i, j) + w * value(i, j + 1);
}

double ValueGrid::value_at(double t, double x) const {
    const double pos = std::clamp((t - t_.front()) / dt(), 0.0, static_cast<double>(t_.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(pos), t_.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * value_at_row(i, x) + w * value_at_row(i + 1, x);
}

double ValueGrid::delta_at_row(std::size_t i, double x) const {
    const std::size_t last = x_.size() - 1;
    auto node_dvdy = [&](std::size_t j) {
        if (j == 0) return (value(i, 1) - value(i, 0)) / dlogx_;
        if (j == last) return (value(i, last) - value(i, last - 1)) / dlogx_;
        return (value(i, j + 1) - value(i, j - 1)) / (2.0 * dlogx_);
    };
    const std::size_t j = cell_of(x);
    const double w = std::clamp((std::log(x) - std::log(x_[j])) / dlogx_, 0.0, 1.0);
    const double dvdy = (1.0 - w) * node_dvdy(j) + w * node_dvdy(j + 1);
    return dvdy / x;
}

namespace {

void check_config(const GbmParams& params, const GridConfig& c) {
    if (params.perpetual()) throw InvalidInput("price_put_fd: horizon must be finite");
    if (c.time_steps < 50 || c.space_cells < 50) {
        throw InvalidInput("price_put_fd: need at least 50 time steps and 50 space cells");
    }
    if (!(c.x_min > 0.0) || !(c.x_max > c.x_min) || !(c.x_min < params.strike) ||
        !(c.x_max > params.strike)) {
        throw InvalidInput("price_put_fd: need 0 < x_min < K < x_max");
    }
    if (!(c.omega > 0.0 && c.omega < 2.0)) throw InvalidInput("price_put_fd: omega must lie in (0, 2)");
    if (c.fit_tol < c.psor_tol) throw InvalidInput("price_put_fd: fit_tol must dominate psor_tol");
    if (c.max_iter == 0) throw InvalidInput("price_put_fd: max_iter must be positive");
}

}  // namespace

ValueGrid price_put_fd(const GbmParams& params, const GridConfig& config) {
    params.validate();
    const GridConfig c = config.resolved(params);
    check_config(params, c);

    const std::size_t m = c.time_steps;
    const std::size_t n = c.space_cells;
    const double k = params.strike;
    const double dt = params.horizon / static_cast<double>(m);
    const double y0 = std::log(c.x_min);
    const double dy = (std::log(c.x_max) - y0) / static_cast<double>(n);

    std::vector<double> t_grid(m + 1);
    for (std::size_t i = 0; i <= m; ++i) t_grid[i] = params.horizon * static_cast<double>(i) / static_cast<double>(m);
    t_grid[m] = params.horizon;
    std::vector<double> x_grid(n + 1);
    for (std::size_t j = 0; j <= n; ++j) x_grid[j] = std::exp(y0 + dy * static_cast<double>(j));

    std::vector<double> gain(n + 1);
    for (std::size_t j = 0; j <= n; ++j) gain[j] = put_payoff(k, x_grid[j]);

    // Operator A V_j = lo V_{j-1} + mid V_j + up V_{j+1} in log-price.
    const double s2 = params.sigma * params.sigma;
    const double nu = params.r - 0.5 * s2;
    const double lo = 0.5 * s2 / (dy * dy) - nu / (2.0 * dy);
    const double up = 0.5 * s2 / (dy * dy) + nu / (2.0 * dy);
    const double mid = -s2 / (dy * dy) - params.r;

    std::vector<double> values((m + 1) * (n + 1));
    auto row = [&](std::size_t i) { return values.begin() + static_cast<std::ptrdiff_t>(i * (n + 1)); };
    std::copy(gain.begin(), gain.end(), row(m));

    std::vector<double> u(gain);
    std::vector<double> rhs(n + 1);
    const double left_bc = k - c.x_min;

    for (std::size_t step = 0; step < m; ++step) {
        const double theta = step < c.rannacher_steps ? 1.0 : 0.5;
        const double ex = (1.0 - theta) * dt;
        const double im = theta * dt;
        for (std::size_t j = 1; j < n; ++j) {
            rhs[j] = u[j] + ex * (lo * u[j - 1] + mid * u[j] + up * u[j + 1]);
        }
        const double diag = 1.0 - im * mid;
        const double off_lo = -im * lo;
        const double off_up = -im * up;
        u[0] = left_bc;
        u[n] = 0.0;

        double worst = 0.0;
        std::size_t it = 0;
        for (; it < c.max_iter; ++it) {
            worst = 0.0;
            for (std::size_t j = 1; j < n; ++j) {
                const double gs = (rhs[j] - off_lo * u[j - 1] - off_up * u[j + 1]) / diag;
                const double next = std::max(gain[j], u[j] + c.omega * (gs - u[j]));
                worst = std::max(worst, std::abs(next - u[j]));
                u[j] = next;
            }
            if (worst <= c.psor_tol) break;
        }
        if (it == c.max_iter) {
            throw SolverError("price_put_fd: PSOR did not converge at t = " +
                                  std::to_string(t_grid[m - step - 1]) +
                                  ", worst residual " + std::to_string(worst),
                              worst);
        }
        std::copy(u.begin(), u.end(), row(m - step - 1));
    }

    return ValueGrid(params, c, std::move(t_grid), std::move(x_grid), std::move(values));
}

double european_put(const GbmParams& params, double x, double time_to_maturity) {
    const double k = params.strike;
    if (time_to_maturity <= 0.0) return put_payoff(k, x);
    const double sd = params.sigma * std::sqrt(time_to_maturity);
    const double d1 = (std::log(x / k) + (params.r + 0.5 * params.sigma * params.sigma) * time_to_maturity) / sd;
    const double d2 = d1 - sd;
    return k * std::exp(-params.r * time_to_maturity) * normal_cdf(-d2) - x * normal_cdf(-d1);
}

}  // namespace optstop
