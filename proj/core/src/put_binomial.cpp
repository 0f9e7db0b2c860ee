#include <algorithm>
#include <cmath>
#include <vector>

#include "optstop/errors.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {
namespace {

struct Tree {
    double dt, u, d, p, disc;
};

Tree crr(const GbmParams& params, std::size_t n_levels) {
    params.validate();
    if (params.perpetual()) throw InvalidInput("binomial tree needs a finite horizon");
    if (n_levels < 1) throw InvalidInput("binomial tree needs n_levels >= 1");
    Tree t{};
    t.dt = params.horizon / static_cast<double>(n_levels);
    t.u = std::exp(params.sigma * std::sqrt(t.dt));
    t.d = 1.0 / t.u;
    t.p = (std::exp(params.r * t.dt) - t.d) / (t.u - t.d);
    t.disc = std::exp(-params.r * t.dt);
    if (!(t.p > 0.0 && t.p < 1.0)) throw InvalidInput("binomial tree: risk-neutral probability outside (0, 1)");
    return t;
}

// Backward induction; calls on_step(i, prices, exercised) at every step i < n.
template <typename OnStep>
double induct(const GbmParams& params, double x0, std::size_t n, OnStep&& on_step) {
    if (!(x0 > 0.0)) throw InvalidInput("binomial tree: x0 must be positive");
    const Tree t = crr(params, n);
    const double k = params.strike;
    const double log_u = std::log(t.u);
    std::vector<double> v(n + 1);
    std::vector<double> price(n + 1);
    std::vector<char> exercised(n + 1);
    // Node j at step i has price x0 u^{2j - i}.
    for (std::size_t j = 0; j <= n; ++j) {
        v[j] = put_payoff(k, x0 * std::exp(log_u * (2.0 * static_cast<double>(j) - static_cast<double>(n))));
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = 0; j <= ii; ++j) {
            price[j] = x0 * std::exp(log_u * (2.0 * static_cast<double>(j) - static_cast<double>(ii)));
            const double cont = t.disc * (t.p * v[j + 1] + (1.0 - t.p) * v[j]);
            const double ex = put_payoff(k, price[j]);
            exercised[j] = ex > 0.0 && ex >= cont;
            v[j] = std::max(cont, ex);
        }
        on_step(ii, t.dt, price, exercised);
    }
    return v[0];
}

}  // namespace

double price_put_binomial(const GbmParams& params, double x0, std::size_t n_levels) {
    return induct(params, x0, n_levels, [](std::size_t, double, const auto&, const auto&) {});
}

std::vector<FrontierPoint> put_binomial_frontier(const GbmParams& params, double x0,
                                                 std::size_t n_levels) {
    std::vector<FrontierPoint> out;
    induct(params, x0, n_levels,
           [&](std::size_t i, double dt, const std::vector<double>& price,
               const std::vector<char>& exercised) {
               // Exercise nodes form a lower set in price; find the top one.
               std::size_t top = 0;
               bool any_ex = false, any_cont = false;
               for (std::size_t j = 0; j <= i; ++j) {
                   if (exercised[j]) {
                       any_ex = true;
                       top = j;
                   } else {
                       any_cont = true;
                   }
               }
               if (any_ex && any_cont) out.push_back({static_cast<double>(i) * dt, price[top]});
           });
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace optstop
