#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optstop/diagnostics.hpp"
#include "optstop/numerics.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {

/// Derivative of V sampled along x_n = b(t) (1 + eta0 2^{-n}) and its
/// Richardson-extrapolated limit at the boundary point.
struct LimitEstimate {
    std::string kind;  ///< "space" or "time"
    double t = 0.0;    ///< grid time actually used
    double boundary = 0.0;
    std::vector<double> x_n;
    std::vector<double> estimates;
    double extrapolated = 0.0;
    double target = 0.0;
    double discrepancy = 0.0;    ///< |extrapolated - target|
    double observed_order = 0.0; ///< log2 ratio of successive differences (last three terms)
};

struct ApproachControls {
    std::size_t n_terms = 4;
    double eta0 = 0.1;
};

/// C-side limit of V_x at (t, b(t)); the target is G_x = -1. t is snapped to
/// the nearest grid row. Throws ResolutionError when consecutive approach
/// points (or the last point and b) are closer than 2 x-cells.
LimitEstimate space_fit_limit(const ValueGrid& grid, const Boundary& boundary, double t,
                              const ApproachControls& approach = {});

struct TimeFitReport {
    LimitEstimate limit;
    double c = 0.0;            ///< Lipschitz constant c(T - t)
    double tolerance = 0.0;    ///< 0.02 c
    bool sign_ok = false;      ///< every sampled V_t <= fit_tol
    bool lipschitz_ok = false; ///< every sampled V_t >= -c (1 + fit_tol)
    bool pass = false;
};

/// C-side limit of V_t at (t, b(t)) by central time differences; target G_t = 0.
TimeFitReport time_fit_limit(const ValueGrid& grid, const Boundary& boundary, double t,
                             const ApproachControls& approach = {});

struct DirectionalFit {
    double t = 0.0;
    double c_side = 0.0;  ///< extrapolated V_x from the continuation side
    double d_side = -1.0; ///< G_x from the exercise side
    double gap = 0.0;
    bool pass = false;    ///< gap <= 0.02
    LimitEstimate space;
};

DirectionalFit directional_fit_check(const ValueGrid& grid, const Boundary& boundary, double t,
                                     const ApproachControls& approach = {});

/// Value of the rule "stop on entry into {x <= b}": mean of e^{-r tau} (K - X_tau)^+.
EstimateWithError mc_value_estimate(const Boundary& boundary, const GbmParams& params,
                                    StartPoint start, const McControls& mc);

struct LagrangeReport {
    double t = 0.0;
    double x = 0.0;
    double lhs = 0.0;  ///< V - (K - x)^+ from the grid
    double rhs = 0.0;  ///< MC local-time functional
    double se = 0.0;
    double z = 0.0;
    double bandwidth = 0.0;
    bool pass = false; ///< |z| <= 3
};

/// Compares V - G on the grid with
/// E[ int_0^tau e^{-rs} dl^K_s / 2 - int_0^tau r K e^{-rs} I(X_s < K) ds ]
/// at tau = entry time into {x <= b}. Default bandwidth 2 sigma K sqrt(dt).
LagrangeReport lagrange_check(const ValueGrid& grid, const Boundary& boundary, StartPoint start,
                              const McControls& mc, std::optional<double> bandwidth = std::nullopt);

/// Draws continuation-set start points (t, x) with t in [0, 0.9 T] and x in
/// [1.02 b(t), 1.5 K], skipping |x - K| < level_exclusion: the kernel
/// local-time estimator with bandwidth eps is biased by about -eps/2 for
/// starts within a few bandwidths of K.
std::vector<StartPoint> sample_continuation_points(const Boundary& boundary, const GbmParams& params,
                                                   std::size_t count, std::uint64_t seed,
                                                   double level_exclusion);

struct LipschitzConstant {
    double c = 0.0;
    double s_star = 0.0;  ///< maximizing s
    double y_star = 0.0;  ///< maximizing y = log x
};

/// c(T - t) = sigma K^2 sup_{s in [(T-t)/2, 2(T-t)], y} e^{-y} s^{-1/2}
/// phi((y - (r - sigma^2/2) s) / (sigma sqrt s)), by a 401 x 401 grid search
/// refined with coordinate golden-section steps.
LipschitzConstant lipschitz_constant(const GbmParams& params, double t, double horizon);

struct LipschitzReport {
    double t = 0.0;
    double c = 0.0;
    double slack = 0.0;
    double worst_margin = 0.0;  ///< min over nodes of V(t+eps) - V(t) + c eps (1 + slack)
    std::size_t violations = 0;
    std::size_t checks = 0;
};

/// Checks V(t + eps, x) - V(t, x) >= -c eps (1 + slack) at every x node.
LipschitzReport lipschitz_bound_check(const ValueGrid& grid, double t,
                                      const std::vector<double>& eps_list);

void write_smoothfit_csv(std::ostream& out, const std::vector<LimitEstimate>& limits);
void write_smoothfit_svg(std::ostream& out, const std::vector<LimitEstimate>& limits);
void write_lagrange_csv(std::ostream& out, const std::vector<LagrangeReport>& rows,
                        const std::vector<double>& c_values);

}  // namespace optstop
