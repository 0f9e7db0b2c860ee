#include "optstop/flowsim.hpp"

#include <cmath>
#include <string>

#include "optstop/errors.hpp"
#include "optstop/numerics.hpp"
#include "optstop/rng.hpp"

namespace optstop {

void GbmParams::validate() const {
    if (!std::isfinite(r) || !std::isfinite(sigma) || !std::isfinite(strike) || std::isnan(horizon)) {
        throw InvalidInput("GbmParams: parameters must be finite");
    }
    if (sigma <= 0.0) throw InvalidInput("GbmParams: sigma must be positive");
    if (strike <= 0.0) throw InvalidInput("GbmParams: strike must be positive");
    if (r < 0.0) throw InvalidInput("GbmParams: r must be nonnegative");
    if (!(horizon > 0.0)) throw InvalidInput("GbmParams: horizon must be positive");
}

double FlowPath::state(std::size_t k, double x0) const {
    return is_unit_flow() ? x0 * unit_flow[k] : states[k];
}

double FlowPath::qv_rate(std::size_t k, double x0) const {
    if (is_unit_flow()) {
        const double sx = sigma * x0 * unit_flow[k];
        return sx * sx;
    }
    return local_vol[k] * local_vol[k];
}

namespace {

void check_grid(double duration, std::size_t n_steps) {
    if (n_steps < 1) throw InvalidInput("flow simulation needs n_steps >= 1");
    if (!std::isfinite(duration) || duration <= 0.0) {
        throw InvalidInput("flow simulation needs a finite positive duration");
    }
}

std::vector<double> uniform_times(double duration, std::size_t n_steps) {
    std::vector<double> t(n_steps + 1);
    const double dt = duration / static_cast<double>(n_steps);
    for (std::size_t k = 0; k <= n_steps; ++k) t[k] = static_cast<double>(k) * dt;
    return t;
}

}  // namespace

std::vector<double> brownian_increments(double duration, std::size_t n_steps, std::uint64_t seed) {
    check_grid(duration, n_steps);
    CounterRng rng(derive_seed(seed, 0));
    const double sqrt_dt = std::sqrt(duration / static_cast<double>(n_steps));
    std::vector<double> db(n_steps);
    for (auto& v : db) v = sqrt_dt * rng.normal();
    return db;
}

FlowPath simulate_gbm_flow(const GbmParams& params, double duration, std::size_t n_steps,
                           std::uint64_t seed, GbmScheme scheme) {
    params.validate();
    check_grid(duration, n_steps);

    FlowPath path;
    path.times = uniform_times(duration, n_steps);
    path.driver = brownian_increments(duration, n_steps, seed);
    path.sigma = params.sigma;
    path.unit_flow.resize(n_steps + 1);
    path.unit_flow[0] = 1.0;

    const double dt = path.times[1];
    if (scheme == GbmScheme::Exact) {
        // Cumulative log form: X^1_t = exp(sigma B_t + (r - sigma^2/2) t).
        const double nu = params.r - 0.5 * params.sigma * params.sigma;
        double b = 0.0;
        for (std::size_t k = 1; k <= n_steps; ++k) {
            b += path.driver[k - 1];
            path.unit_flow[k] = std::exp(params.sigma * b + nu * path.times[k]);
        }
    } else {
        for (std::size_t k = 1; k <= n_steps; ++k) {
            path.unit_flow[k] =
                path.unit_flow[k - 1] * (1.0 + params.r * dt + params.sigma * path.driver[k - 1]);
        }
    }
    // d(x X^1)/dx = X^1.
    path.deriv = path.unit_flow;
    return path;
}

FlowPath simulate_sde_flow_with_driver(const SdeSpec& spec, double x0, double duration,
                                       const std::vector<double>& driver) {
    if (!spec.mu || !spec.vol || !spec.mu_prime || !spec.vol_prime) {
        throw InvalidInput("SdeSpec: all four coefficient functions are required");
    }
    check_grid(duration, driver.size());
    if (!spec.contains(x0)) throw InvalidInput("simulate_sde_flow: x0 outside the state domain");

    const std::size_t n = driver.size();
    FlowPath path;
    path.times = uniform_times(duration, n);
    path.driver = driver;
    path.states.reserve(n + 1);
    path.deriv.reserve(n + 1);
    path.local_vol.reserve(n + 1);

    const double dt = path.times[1];
    double x = x0;
    double dx = 1.0;
    path.states.push_back(x);
    path.deriv.push_back(dx);
    path.local_vol.push_back(spec.vol(x));
    for (std::size_t k = 0; k < n; ++k) {
        const double db = driver[k];
        const double next_x = x + spec.mu(x) * dt + spec.vol(x) * db;
        const double next_dx = dx * (1.0 + spec.mu_prime(x) * dt + spec.vol_prime(x) * db);
        if (!std::isfinite(next_x) || !spec.contains(next_x)) {
            path.truncated = true;
            break;
        }
        x = next_x;
        dx = next_dx;
        path.states.push_back(x);
        path.deriv.push_back(dx);
        path.local_vol.push_back(spec.vol(x));
    }
    path.times.resize(path.states.size());
    path.driver.resize(path.states.size() - 1);
    return path;
}

FlowPath simulate_sde_flow(const SdeSpec& spec, double x0, double duration, std::size_t n_steps,
                           std::uint64_t seed) {
    return simulate_sde_flow_with_driver(spec, x0, duration,
                                         brownian_increments(duration, n_steps, seed));
}

double gbm_unit_density(double s, double x, const GbmParams& params) {
    if (!(s > 0.0) || !(x > 0.0)) {
        throw InvalidInput("gbm_unit_density: s and x must be positive");
    }
    const double sd = params.sigma * std::sqrt(s);
    const double z = (std::log(x) - (params.r - 0.5 * params.sigma * params.sigma) * s) / sd;
    return normal_pdf(z) / (sd * x);
}

double local_time_estimate(const FlowPath& path, double x0, double level, double bandwidth) {
    if (!(bandwidth > 0.0)) throw InvalidInput("local_time_estimate: bandwidth must be positive");
    const std::size_t n = path.size();
    if (n < 2) return 0.0;
    const double dt = path.dt();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(path.state(k, x0) - level) < bandwidth) acc += path.qv_rate(k, x0);
    }
    return acc * dt / (2.0 * bandwidth);
}

double default_local_time_bandwidth(const GbmParams& params, double dt) {
    return 2.0 * params.sigma * params.strike * std::sqrt(dt);
}

EstimateWithError summarize(std::span<const double> samples) {
    EstimateWithError e;
    e.n = samples.size();
    if (e.n == 0) return e;
    double sum = 0.0;
    for (double v : samples) sum += v;
    e.mean = sum / static_cast<double>(e.n);
    if (e.n < 2) return e;
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
    return e;
}

}  // namespace optstop
