#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace optstop {

/// Black-Scholes dynamics dX = rX dt + sigma X dB for the put problems.
struct GbmParams {
    double r = 0.05;       ///< discount and drift rate
    double sigma = 0.2;    ///< volatility, > 0
    double strike = 100.0; ///< K, > 0
    double horizon = 1.0;  ///< T, > 0 or +inf for the perpetual problem

    bool perpetual() const noexcept { return horizon == std::numeric_limits<double>::infinity(); }

    /// Throws InvalidInput unless the invariants hold.
    void validate() const;
};

/// One-dimensional diffusion dX = mu(X) dt + vol(X) dB with the coefficient
/// derivatives needed by the variational equation.
struct SdeSpec {
    std::function<double(double)> mu;
    std::function<double(double)> vol;
    std::function<double(double)> mu_prime;
    std::function<double(double)> vol_prime;
    double domain_lo = -std::numeric_limits<double>::infinity();
    double domain_hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return x > domain_lo && x < domain_hi; }
};

enum class GbmScheme { Exact, Euler };

/// A simulated trajectory together with its pathwise spatial derivative.
///
/// A GBM flow is stored through the unit flow X^1 so that any starting point
/// x gives state x * X^1 on the same driver. A generic flow stores explicit
/// states for its single starting point.
struct FlowPath {
    std::vector<double> times;      ///< t_0 = 0 < ... < t_N, constant step
    std::vector<double> driver;     ///< Brownian increments, size N
    std::vector<double> unit_flow;  ///< X^1(t_k); empty for explicit-state paths
    std::vector<double> states;     ///< explicit X(t_k); empty for GBM paths
    std::vector<double> deriv;      ///< d X(t_k) / d x
    std::vector<double> local_vol;  ///< vol(X(t_k)) for explicit-state paths
    double sigma = 0.0;             ///< GBM volatility (quadratic variation sigma^2 X^2)
    bool truncated = false;         ///< explicit path left its state domain

    std::size_t size() const noexcept { return times.size(); }
    double dt() const noexcept { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    bool is_unit_flow() const noexcept { return !unit_flow.empty(); }

    /// Process value at grid point k when started from x0 (x0 is ignored for
    /// explicit-state paths).
    double state(std::size_t k, double x0) const;

    /// Rate of the quadratic variation d<X,X>/dt at grid point k.
    double qv_rate(std::size_t k, double x0) const;
};

/// GBM unit flow X^1 on a uniform grid. The exact scheme draws per-step
/// lognormal increments; the Euler scheme uses the same increments in
/// X_{k+1} = X_k (1 + r dt + sigma dB).
FlowPath simulate_gbm_flow(const GbmParams& params, double duration, std::size_t n_steps,
                           std::uint64_t seed, GbmScheme scheme = GbmScheme::Exact);

/// Euler-Maruyama flow of a generic SDE with the variational recursion
/// d(dX/dx) = (mu'(X) dt + vol'(X) dB) dX/dx. A path that leaves the state
/// domain is cut at its last valid point and flagged truncated.
FlowPath simulate_sde_flow(const SdeSpec& spec, double x0, double duration, std::size_t n_steps,
                           std::uint64_t seed);

/// Same as simulate_sde_flow, driven by caller-supplied Brownian increments.
FlowPath simulate_sde_flow_with_driver(const SdeSpec& spec, double x0, double duration,
                                       const std::vector<double>& driver);

/// Brownian increments used by every flow simulated from `seed`.
std::vector<double> brownian_increments(double duration, std::size_t n_steps, std::uint64_t seed);

/// Density of X^1_s = exp(sigma B_s + (r - sigma^2/2) s) at x.
double gbm_unit_density(double s, double x, const GbmParams& params);

/// Occupation estimate of the local time of X^{x0} at `level` over the whole
/// path: (1/2 eps) * sum_k I(|X_k - level| < eps) * qv_rate_k * dt, using the
/// left endpoint of each step.
double local_time_estimate(const FlowPath& path, double x0, double level, double bandwidth);

/// Default bandwidth 2 sigma K sqrt(dt): two typical one-step moves at the level.
double default_local_time_bandwidth(const GbmParams& params, double dt);

}  // namespace optstop
