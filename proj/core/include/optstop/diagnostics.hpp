#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "optstop/flowsim.hpp"
#include "optstop/numerics.hpp"
#include "optstop/putsolver.hpp"

namespace optstop {

struct StartPoint {
    double t = 0.0;
    double x = 0.0;
};

/// Monte Carlo controls shared by the path-based estimators.
struct McControls {
    std::size_t n_paths = 100000;
    double dt = 1e-4;
    std::uint64_t seed = 20240601;
    bool bridge = true;
};

struct StoppingTimeSample {
    double tau = 0.0;               ///< entry time, censored at the remaining horizon
    bool hit = false;               ///< entered D before the horizon
    bool bridge_corrected = false;  ///< entry detected by the bridge test, not a grid point
    double x_tau = 0.0;             ///< state at tau (boundary level on a crossing)
};

struct EntryTimeSamples {
    std::vector<StoppingTimeSample> paths;
    double remaining = 0.0;       ///< T - t of the start point
    double step = 0.0;            ///< monitoring step actually used
    bool degenerate_start = false;///< start lay strictly inside D

    double hit_fraction() const;
    EstimateWithError mean_tau() const;
    /// P(tau >= eps) with binomial standard error sqrt(p(1-p)/n).
    EstimateWithError prob_tau_at_least(double eps) const;
};

/// Options that select between entry (tau_D) and hitting (sigma_D) times and
/// shift the boundary for the interior D° = {x <= b - delta}.
struct EntryOptions {
    bool exclude_start = false;  ///< only t > 0 counts (hitting time sigma_D)
    double level_offset = 0.0;   ///< boundary used is b(t) - level_offset
};

/// First entry of GBM started at `start` into {x <= b(t + s)}, monitored on a
/// uniform grid with step <= dt and, if enabled, a Brownian-bridge crossing
/// test between grid points. Paths are censored at the horizon.
EntryTimeSamples sample_entry_time(const Boundary& boundary, const GbmParams& params,
                                   StartPoint start, const McControls& mc,
                                   const EntryOptions& options = {});

/// Strict margin separating D from its interior: sigma b sqrt(dt) / 100.
double bridge_resolution(const GbmParams& params, double level, double dt);

struct ScanControls {
    std::size_t n_terms = 10;
    double eta0 = 0.1;
    std::vector<double> eps_list{0.01};
};

struct ScanCell {
    std::size_t n;
    double x_n;
    double eps;
    double p_hat;
    double se;
    double mean_tau;
};

/// Green-regularity table along x_n = b(t) (1 + eta0 2^{-n}).
struct RegularityScan {
    double t = 0.0;
    double b = 0.0;
    std::vector<double> x_n;
    std::vector<double> eps_list;
    std::vector<ScanCell> cells;      ///< row-major in (n, eps)
    std::vector<EstimateWithError> mean_tau;

    const ScanCell& cell(std::size_t term, std::size_t eps_index) const {
        return cells[term * eps_list.size() + eps_index];
    }
    /// Every column decreases in n up to 2 combined standard errors.
    bool monotone_trend() const;
    /// The last term of every column is the column minimum up to 2 SE.
    bool final_is_minimum() const;
};

/// Estimates P(tau_D >= eps) from every x_n on a common driver. Rejects
/// boundary points with no remaining horizon.
RegularityScan green_scan(const Boundary& boundary, const GbmParams& params, double t,
                          const ScanControls& scan, const McControls& mc);

struct StableBoundaryReport {
    double t = 0.0;
    double b = 0.0;
    double delta = 0.0;
    double eps0 = 1e-3;
    double fraction_over_eps0 = 0.0;
    double mean_difference = 0.0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0, max_difference = 0.0;
    std::size_t n_paths = 0;
    bool pass = false;  ///< fraction_over_eps0 <= 0.02
};

/// Starting on the boundary, compares hitting times of D and of D°. The
/// default delta is bridge_resolution. Rejects boundaries that decrease.
StableBoundaryReport stable_boundary_check(const Boundary& boundary, const GbmParams& params,
                                           double t, const McControls& mc,
                                           std::optional<double> delta = std::nullopt,
                                           double eps0 = 1e-3);

void write_green_scan_csv(std::ostream& out, const RegularityScan& scan);
void write_stable_csv(std::ostream& out, const StableBoundaryReport& report);

}  // namespace optstop
