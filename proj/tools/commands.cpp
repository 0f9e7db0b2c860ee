#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "optstop/errors.hpp"
#include "optstop/parallel.hpp"
#include "optstop/report.hpp"

namespace optstop::cli {
namespace {

using nlohmann::json;

struct Solved {
    ValueGrid grid;
    Boundary boundary;
};

Solved solve(const RunConfig& cfg) {
    ValueGrid grid = price_put_fd(cfg.params(), cfg.grid());
    Boundary boundary = extract_boundary(grid);
    return {std::move(grid), std::move(boundary)};
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name, CommandResult& res) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = cfg.out_dir / name;
    std::ofstream out(path);
    if (!out) throw NumericalError("cannot write '" + path.string() + "'");
    res.files.push_back(path.string());
    return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc, CommandResult& res) {
    if (!cfg.json) return;
    auto out = open_out(cfg, name, res);
    out << std::setw(2) << doc << '\n';
}

json limit_json(const LimitEstimate& e) {
    return {{"t", e.t},
            {"kind", e.kind},
            {"boundary", e.boundary},
            {"x_n", e.x_n},
            {"estimates", e.estimates},
            {"extrapolated", e.extrapolated},
            {"target", e.target},
            {"discrepancy", e.discrepancy},
            {"observed_order", e.observed_order}};
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

CommandResult cmd_solve(const RunConfig& cfg, std::ostream& log) {
    CommandResult res;
    const Solved s = solve(cfg);
    {
        auto out = open_out(cfg, "value.csv", res);
        write_value_csv(out, s.grid, cfg.value_stride_t, cfg.value_stride_x);
    }
    {
        auto out = open_out(cfg, "boundary.csv", res);
        write_boundary_csv(out, s.boundary);
    }
    const double k = cfg.strike;
    log << "solve: V(0, K) = " << s.grid.value_at(0.0, k) << ", b(0) = " << s.boundary.b.front()
        << ", b(T) = " << s.boundary.b.back() << ", max pre-projection drop = " << s.boundary.max_violation_cells
        << " cells\n";
    write_json(cfg, "solve.json",
               {{"V0_at_strike", s.grid.value_at(0.0, k)},
                {"b0", s.boundary.b.front()},
                {"bT", s.boundary.b.back()},
                {"max_violation", s.boundary.max_violation},
                {"max_violation_cells", s.boundary.max_violation_cells},
                {"time_steps", cfg.time_steps},
                {"space_cells", cfg.space_cells}},
               res);
    return res;
}

CommandResult cmd_smoothfit(const RunConfig& cfg, std::ostream& log) {
    CommandResult res;
    const Solved s = solve(cfg);
    const ApproachControls approach{cfg.fit_terms, cfg.eta0};
    std::vector<LimitEstimate> limits;
    json rows = json::array();
    for (double t : cfg.fit_times) {
        const DirectionalFit dir = directional_fit_check(s.grid, s.boundary, t, approach);
        const TimeFitReport tf = time_fit_limit(s.grid, s.boundary, t, approach);
        limits.push_back(dir.space);
        limits.push_back(tf.limit);
        res.checks_passed = res.checks_passed && dir.pass && tf.pass;
        log << "t = " << dir.t << ": V_x -> " << dir.c_side << " (gap " << dir.gap << ", " << verdict(dir.pass)
            << "); V_t -> " << tf.limit.extrapolated << " (tol " << tf.tolerance << ", c = " << tf.c << ", "
            << verdict(tf.pass) << ")\n";
        json space = limit_json(dir.space);
        space["tolerance"] = 0.02;
        space["d_side"] = dir.d_side;
        space["pass"] = dir.pass;
        json time = limit_json(tf.limit);
        time["tolerance"] = tf.tolerance;
        time["c"] = tf.c;
        time["sign_ok"] = tf.sign_ok;
        time["lipschitz_ok"] = tf.lipschitz_ok;
        time["pass"] = tf.pass;
        rows.push_back(space);
        rows.push_back(time);
    }
    {
        auto out = open_out(cfg, "smoothfit.csv", res);
        write_smoothfit_csv(out, limits);
    }
    {
        auto out = open_out(cfg, "smoothfit.svg", res);
        write_smoothfit_svg(out, limits);
    }
    write_json(cfg, "smoothfit.json", {{"limits", rows}, {"pass", res.checks_passed}}, res);
    return res;
}

CommandResult cmd_regularity(const RunConfig& cfg, std::ostream& log) {
    CommandResult res;
    const Solved s = solve(cfg);
    const GbmParams p = cfg.params();
    const RegularityScan scan = green_scan(s.boundary, p, cfg.scan_t, {cfg.n_terms, cfg.eta0, cfg.eps_list}, cfg.mc());
    const StableBoundaryReport stable = stable_boundary_check(s.boundary, p, cfg.scan_t, cfg.mc());

    bool final_small = true;
    for (std::size_t e = 0; e < scan.eps_list.size(); ++e) {
        final_small = final_small && scan.cell(scan.x_n.size() - 1, e).p_hat <= 0.02;
    }
    const bool trend = scan.monotone_trend() && scan.final_is_minimum();
    res.checks_passed = final_small && trend && stable.pass;
    log << "green scan at t = " << scan.t << ", b = " << scan.b << ": final P(tau >= eps) <= 0.02 "
        << verdict(final_small) << ", monotone trend " << verdict(trend) << "\n";
    log << "stable boundary: fraction differing by > " << stable.eps0 << " is " << stable.fraction_over_eps0 << " "
        << verdict(stable.pass) << "\n";

    {
        auto out = open_out(cfg, "green_scan.csv", res);
        write_green_scan_csv(out, scan);
    }
    {
        auto out = open_out(cfg, "stable.csv", res);
        write_stable_csv(out, stable);
    }
    {
        static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
        std::vector<SvgSeries> series;
        for (std::size_t e = 0; e < scan.eps_list.size(); ++e) {
            SvgSeries line;
            std::ostringstream label;
            label << "eps=" << scan.eps_list[e];
            line.label = label.str();
            line.color = palette[e % 5];
            for (std::size_t n = 0; n < scan.x_n.size(); ++n) {
                line.x.push_back(static_cast<double>(n + 1));
                line.y.push_back(scan.cell(n, e).p_hat);
            }
            series.push_back(std::move(line));
        }
        auto out = open_out(cfg, "green_scan.svg", res);
        write_line_plot_svg(out, "Green regularity scan", "approach index n", "P(tau_D >= eps)", series);
    }
    json cells = json::array();
    for (const auto& c : scan.cells) {
        cells.push_back({{"n", c.n}, {"x_n", c.x_n}, {"eps", c.eps}, {"p_hat", c.p_hat}, {"se", c.se}, {"mean_tau", c.mean_tau}});
    }
    write_json(cfg, "regularity.json",
               {{"green_scan", {{"t", scan.t}, {"b", scan.b}, {"cells", cells}, {"monotone", trend}, {"final_small", final_small}}},
                {"stable",
                 {{"delta", stable.delta},
                  {"fraction_over_eps0", stable.fraction_over_eps0},
                  {"mean_difference", stable.mean_difference},
                  {"max_difference", stable.max_difference},
                  {"pass", stable.pass}}},
                {"pass", res.checks_passed}},
               res);
    return res;
}

CommandResult cmd_lagrange(const RunConfig& cfg, std::ostream& log) {
    CommandResult res;
    const Solved s = solve(cfg);
    const GbmParams p = cfg.params();
    const McControls mc{cfg.lagrange_paths, cfg.lagrange_dt, cfg.seed, cfg.bridge};
    std::vector<StartPoint> starts = cfg.lagrange_starts;
    if (starts.empty()) {
        const double eps = default_local_time_bandwidth(p, cfg.lagrange_dt);
        starts = sample_continuation_points(s.boundary, p, cfg.lagrange_points, cfg.seed, 4.0 * eps);
    }

    std::vector<LagrangeReport> rows;
    std::vector<double> c_values;
    json jrows = json::array();
    for (const auto& st : starts) {
        const LagrangeReport r = lagrange_check(s.grid, s.boundary, st, mc);
        const double c = lipschitz_constant(p, st.t, p.horizon).c;
        rows.push_back(r);
        c_values.push_back(c);
        res.checks_passed = res.checks_passed && r.pass;
        jrows.push_back({{"t", r.t}, {"x", r.x}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"se", r.se}, {"z", r.z}, {"c", c}, {"pass", r.pass}});
        log << "lagrange (" << r.t << ", " << r.x << "): lhs " << r.lhs << ", rhs " << r.rhs << " +- " << r.se
            << ", z = " << r.z << " " << verdict(r.pass) << "\n";
    }
    const LipschitzReport lip = lipschitz_bound_check(s.grid, cfg.lipschitz_t, cfg.lipschitz_eps);
    res.checks_passed = res.checks_passed && lip.violations == 0;
    log << "lipschitz bound at t = " << lip.t << ": c = " << lip.c << ", " << lip.violations << " violations of "
        << lip.checks << " " << verdict(lip.violations == 0) << "\n";

    {
        auto out = open_out(cfg, "lagrange.csv", res);
        write_lagrange_csv(out, rows, c_values);
    }
    {
        auto out = open_out(cfg, "lipschitz.csv", res);
        out.precision(12);
        out << "t,c,slack,worst_margin,violations,checks\n"
            << lip.t << ',' << lip.c << ',' << lip.slack << ',' << lip.worst_margin << ',' << lip.violations << ','
            << lip.checks << '\n';
    }
    write_json(cfg, "lagrange.json",
               {{"rows", jrows},
                {"lipschitz", {{"t", lip.t}, {"c", lip.c}, {"slack", lip.slack}, {"worst_margin", lip.worst_margin}, {"violations", lip.violations}}},
                {"pass", res.checks_passed}},
               res);
    return res;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal stopping laboratory for the American put"};
    app.allow_extras();
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool json_flag = false;
    app.add_option("command", command, "solve | smoothfit | regularity | lagrange | all")
        ->required()
        ->check(CLI::IsMember({"solve", "smoothfit", "regularity", "lagrange", "all"}));
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master seed");
    app.add_flag("--json", json_flag, "also write machine-readable JSON reports");

    RunConfig cfg;
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) load_config_file(cfg, config_path);
        const std::vector<std::string> extras = app.remaining();
        for (std::size_t i = 0; i < extras.size(); ++i) {
            const std::string& flag = extras[i];
            if (flag.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + flag + "'");
            std::string key = flag.substr(2);
            std::string value;
            if (const auto eq = key.find('='); eq != std::string::npos) {
                value = key.substr(eq + 1);
                key.erase(eq);
            } else {
                if (i + 1 >= extras.size()) throw ConfigError("override '" + flag + "' needs a value");
                value = extras[++i];
            }
            cfg.set(key, value);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed) cfg.seed = *seed;
        if (json_flag) cfg.json = true;
        cfg.validate();
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kSuccess;
        }
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    }

    set_worker_count(cfg.workers);
    try {
        bool ok = true;
        auto run_one = [&](auto&& fn) {
            const CommandResult r = fn(cfg, out);
            for (const auto& f : r.files) out << "wrote " << f << "\n";
            ok = ok && r.checks_passed;
        };
        if (command == "solve" || command == "all") run_one(cmd_solve);
        if (command == "smoothfit" || command == "all") run_one(cmd_smoothfit);
        if (command == "regularity" || command == "all") run_one(cmd_regularity);
        if (command == "lagrange" || command == "all") run_one(cmd_lagrange);
        if (!ok) {
            err << "one or more checks failed\n";
            return kNumericalFailure;
        }
        return kSuccess;
    } catch (const InvalidInput& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace optstop::cli
