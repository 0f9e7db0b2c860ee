#include <cmath>
#include <string>

#include "optstop/errors.hpp"
#include "optstop/numerics.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {

double PerpetualPut::value(double x) const {
    if (x < b_star) return strike - x;
    return (strike - b_star) * std::pow(x / b_star, -exponent);
}

double PerpetualPut::derivative(double x) const {
    if (x < b_star) return -1.0;
    return -exponent * (strike - b_star) * std::pow(x / b_star, -exponent) / x;
}

double threshold_value(const GbmParams& params, double y, double x) {
    if (x <= y) return params.strike - x;
    const double gamma = 2.0 * params.r / (params.sigma * params.sigma);
    return (params.strike - y) * std::pow(x / y, -gamma);
}

double threshold_argmax(const GbmParams& params, double x) {
    const double hi = std::min(x, params.strike);
    return golden_section_max([&](double y) { return threshold_value(params, y, x); },
                              1e-12 * params.strike, hi, 1e-14);
}

PerpetualPut perpetual_put(const GbmParams& params) {
    if (!std::isfinite(params.r) || params.r <= 0.0) {
        throw InvalidInput("perpetual_put: r must be positive");
    }
    GbmParams p = params;
    p.horizon = 1.0;  // validation of the remaining fields only
    p.validate();

    const double s2 = params.sigma * params.sigma;
    PerpetualPut put{params.strike, 2.0 * params.r * params.strike / (2.0 * params.r + s2),
                     2.0 * params.r / s2};

    // The threshold maximum at a point above the strike must land on b*.
    const double probe = 2.0 * params.strike;
    const double y_hat = threshold_argmax(params, probe);
    const double rel = std::abs(y_hat - put.b_star) / put.b_star;
    if (rel > 1e-6) {
        throw NumericalError("perpetual_put: threshold oracle disagrees with closed form (rel " +
                             std::to_string(rel) + ")");
    }
    return put;
}

}  // namespace optstop
