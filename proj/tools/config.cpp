#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace optstop::cli {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& p : split(v, ',')) out.push_back(to_double(key, p));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"K", [](RunConfig& c, auto& k, auto& v) { c.strike = to_double(k, v); }},
        {"r", [](RunConfig& c, auto& k, auto& v) { c.r = to_double(k, v); }},
        {"sigma", [](RunConfig& c, auto& k, auto& v) { c.sigma = to_double(k, v); }},
        {"T", [](RunConfig& c, auto& k, auto& v) { c.horizon = to_double(k, v); }},
        {"M", [](RunConfig& c, auto& k, auto& v) { c.time_steps = to_uint(k, v); }},
        {"N", [](RunConfig& c, auto& k, auto& v) { c.space_cells = to_uint(k, v); }},
        {"x_min", [](RunConfig& c, auto& k, auto& v) { c.x_min = to_double(k, v); }},
        {"x_max", [](RunConfig& c, auto& k, auto& v) { c.x_max = to_double(k, v); }},
        {"fit_tol", [](RunConfig& c, auto& k, auto& v) { c.fit_tol = to_double(k, v); }},
        {"psor_tol", [](RunConfig& c, auto& k, auto& v) { c.psor_tol = to_double(k, v); }},
        {"max_iter", [](RunConfig& c, auto& k, auto& v) { c.max_iter = to_uint(k, v); }},
        {"omega", [](RunConfig& c, auto& k, auto& v) { c.omega = to_double(k, v); }},
        {"value_stride_t", [](RunConfig& c, auto& k, auto& v) { c.value_stride_t = to_uint(k, v); }},
        {"value_stride_x", [](RunConfig& c, auto& k, auto& v) { c.value_stride_x = to_uint(k, v); }},
        {"n_paths", [](RunConfig& c, auto& k, auto& v) { c.n_paths = to_uint(k, v); }},
        {"dt", [](RunConfig& c, auto& k, auto& v) { c.dt = to_double(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
        {"bridge", [](RunConfig& c, auto& k, auto& v) { c.bridge = to_bool(k, v); }},
        {"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = to_uint(k, v); }},
        {"n_terms", [](RunConfig& c, auto& k, auto& v) { c.n_terms = to_uint(k, v); }},
        {"eta0", [](RunConfig& c, auto& k, auto& v) { c.eta0 = to_double(k, v); }},
        {"eps_list", [](RunConfig& c, auto& k, auto& v) { c.eps_list = to_list(k, v); }},
        {"scan_t", [](RunConfig& c, auto& k, auto& v) { c.scan_t = to_double(k, v); }},
        {"fit_terms", [](RunConfig& c, auto& k, auto& v) { c.fit_terms = to_uint(k, v); }},
        {"fit_times", [](RunConfig& c, auto& k, auto& v) { c.fit_times = to_list(k, v); }},
        {"lagrange_points", [](RunConfig& c, auto& k, auto& v) { c.lagrange_points = to_uint(k, v); }},
        {"lagrange_paths", [](RunConfig& c, auto& k, auto& v) { c.lagrange_paths = to_uint(k, v); }},
        {"lagrange_dt", [](RunConfig& c, auto& k, auto& v) { c.lagrange_dt = to_double(k, v); }},
        {"lagrange_starts",
         [](RunConfig& c, auto& k, auto& v) {
             c.lagrange_starts.clear();
             for (const auto& item : split(v, ',')) {
                 const auto parts = split(item, ':');
                 if (parts.size() != 2) throw ConfigError("config key '" + k + "': expected t:x pairs");
                 c.lagrange_starts.push_back({to_double(k, parts[0]), to_double(k, parts[1])});
             }
         }},
        {"lipschitz_t", [](RunConfig& c, auto& k, auto& v) { c.lipschitz_t = to_double(k, v); }},
        {"lipschitz_eps", [](RunConfig& c, auto& k, auto& v) { c.lipschitz_eps = to_list(k, v); }},
        {"out", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
        {"json", [](RunConfig& c, auto& k, auto& v) { c.json = to_bool(k, v); }},
    };
    return table;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid configuration: " + what);
}

}  // namespace

GridConfig RunConfig::grid() const {
    GridConfig g;
    g.time_steps = time_steps;
    g.space_cells = space_cells;
    g.x_min = x_min;
    g.x_max = x_max;
    g.fit_tol = fit_tol;
    g.psor_tol = psor_tol;
    g.max_iter = max_iter;
    g.omega = omega;
    return g.resolved(params());
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(*this, key, trim(value));
}

void RunConfig::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(strike) && strike > 0.0, "K must be positive");
    require(finite(r) && r > 0.0, "r must be positive");
    require(finite(sigma) && sigma > 0.0, "sigma must be positive");
    require(finite(horizon) && horizon > 0.0, "T must be finite and positive");
    require(time_steps >= 50 && space_cells >= 50, "M and N must be at least 50");
    const GridConfig g = grid();
    require(g.x_min > 0.0 && g.x_min < strike && g.x_max > strike, "need 0 < x_min < K < x_max");
    require(g.fit_tol >= g.psor_tol, "fit_tol must be at least psor_tol");
    require(omega > 0.0 && omega < 2.0, "omega must lie in (0, 2)");
    require(max_iter > 0, "max_iter must be positive");
    require(n_paths >= 2 && lagrange_paths >= 2, "path counts must be at least 2");
    require(finite(dt) && dt > 0.0, "dt must be positive");
    require(finite(lagrange_dt) && lagrange_dt > 0.0, "lagrange_dt must be positive");
    require(n_terms >= 4, "n_terms must be at least 4");
    require(fit_terms >= 3, "fit_terms must be at least 3");
    require(eta0 > 0.0, "eta0 must be positive");
    for (double e : eps_list) require(e > 0.0, "eps_list entries must be positive");
    require(scan_t >= 0.0 && scan_t < horizon, "scan_t must lie in [0, T)");
    require(dt <= (horizon - scan_t) / 100.0, "dt must be at most (T - scan_t) / 100");
    for (double t : fit_times) require(t > 0.0 && t < horizon, "fit_times must lie in (0, T)");
    for (const auto& s : lagrange_starts) {
        require(s.t >= 0.0 && s.t < horizon && s.x > 0.0, "lagrange_starts must satisfy 0 <= t < T, x > 0");
        require(lagrange_dt <= (horizon - s.t) / 100.0, "lagrange_dt too large for a lagrange start");
    }
    require(lipschitz_t >= 0.0 && lipschitz_t < horizon, "lipschitz_t must lie in [0, T)");
    for (double e : lipschitz_eps) {
        require(e >= 0.0 && lipschitz_t + e <= horizon, "lipschitz_eps must keep t + eps within [0, T]");
    }
    require(value_stride_t >= 1 && value_stride_x >= 1, "value strides must be at least 1");
}

void load_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    load_config_text(cfg, ss.str());
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters()) keys.push_back(k);
    return keys;
}

}  // namespace optstop::cli
