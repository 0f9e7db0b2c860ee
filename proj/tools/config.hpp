#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "optstop/diagnostics.hpp"
#include "optstop/putsolver.hpp"
#include "optstop/smoothfit.hpp"

namespace optstop::cli {

/// Bad command line or configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // problem
    double strike = 100.0;
    double r = 0.05;
    double sigma = 0.2;
    double horizon = 1.0;
    // grid
    std::size_t time_steps = 1000;
    std::size_t space_cells = 2000;
    double x_min = 0.0;
    double x_max = 0.0;
    double fit_tol = 0.0;
    double psor_tol = 0.0;
    std::size_t max_iter = 10000;
    double omega = 1.3;
    std::size_t value_stride_t = 10;
    std::size_t value_stride_x = 5;
    // Monte Carlo
    std::size_t n_paths = 100000;
    double dt = 1e-4;
    std::uint64_t seed = 20240601;
    bool bridge = true;
    std::size_t workers = 0;
    // scans
    std::size_t n_terms = 10;
    double eta0 = 0.1;
    std::vector<double> eps_list{0.01};
    double scan_t = 0.5;
    std::size_t fit_terms = 4;
    std::vector<double> fit_times{0.1, 0.3, 0.5, 0.7, 0.9};
    // Lagrange / Lipschitz
    std::size_t lagrange_points = 10;
    std::size_t lagrange_paths = 100000;
    double lagrange_dt = 1e-3;
    std::vector<StartPoint> lagrange_starts;
    double lipschitz_t = 0.5;
    std::vector<double> lipschitz_eps{0.01, 0.02, 0.05};
    // output
    std::filesystem::path out_dir = "out";
    bool json = false;

    GbmParams params() const { return {r, sigma, strike, horizon}; }
    GridConfig grid() const;
    McControls mc() const { return {n_paths, dt, seed, bridge}; }

    /// Sets one field from its text form; throws ConfigError for unknown
    /// keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    /// Checks the module preconditions before any computation starts.
    void validate() const;
};

/// Reads flat `key = value` lines; `#` starts a comment.
void load_config_text(RunConfig& cfg, const std::string& text);
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

std::vector<std::string> known_keys();

}  // namespace optstop::cli
