#include "spinport/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace spinport {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, int line)
{
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ScenarioError(line, "malformed number '" + value + "'");
    }
    return v;
}

std::int64_t parse_integer(const std::string& value, int line)
{
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ScenarioError(line, "malformed integer '" + value + "'");
    }
    return v;
}

std::uint64_t parse_seed(const std::string& value, int line)
{
    if (value.empty() || value[0] == '-') {
        throw ScenarioError(line, "seed must be a non-negative integer");
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size()) {
        throw ScenarioError(line, "malformed seed '" + value + "'");
    }
    return v;
}

} // namespace

ScenarioError::ScenarioError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line)
{
}

ScenarioConfig parse_scenario_text(const std::string& text)
{
    ScenarioConfig cfg;

    std::map<std::string, std::pair<std::string, int>> entries; // key -> (value, line)
    {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string line = trim(raw);
            if (line.empty() || line[0] == '#') {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ScenarioError(line_no, "expected 'key = value'");
            }
            const std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            const auto hash = value.find('#');
            if (hash != std::string::npos) {
                value = trim(value.substr(0, hash));
            }
            if (key.empty()) {
                throw ScenarioError(line_no, "empty key");
            }
            if (value.empty()) {
                throw ScenarioError(line_no, "empty value for key '" + key + "'");
            }
            if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
                throw ScenarioError(line_no, "duplicate key '" + key + "'");
            }
        }
    }

    std::map<std::string, int> used_lines;
    const auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        const auto it = entries.find(key);
        if (it == entries.end()) {
            return std::nullopt;
        }
        used_lines[key] = it->second.second;
        const auto result = it->second;
        entries.erase(it);
        return result;
    };
    const auto number = [&](const std::string& key, double& target) {
        if (const auto e = take(key)) {
            target = parse_number(e->first, e->second);
        }
    };
    const auto line_of = [&](const std::string& key) {
        const auto it = used_lines.find(key);
        return it == used_lines.end() ? 0 : it->second;
    };
    const auto check = [&](bool ok, const std::string& key, const std::string& message) {
        if (!ok) {
            throw ScenarioError(line_of(key), key + ": " + message);
        }
    };

    number("n_atoms", cfg.params.n_atoms);
    number("cooperativity", cfg.params.cooperativity);
    number("gamma0_hz", cfg.gamma0_hz);
    number("squeezing_r", cfg.params.squeezing_r);
    number("gain_g", cfg.params.gain_g);
    number("input.mean_x", cfg.input.mean_x);
    number("input.mean_y", cfg.input.mean_y);
    number("input.var_x", cfg.input.var_x);
    number("input.var_y", cfg.input.var_y);
    number("input.cov_xy", cfg.input.cov_xy);
    number("mc.dt", cfg.mc.dt);
    number("mc.t_max", cfg.mc.t_max);
    if (const auto e = take("mc.n_traj")) {
        cfg.mc.n_traj = parse_integer(e->first, e->second);
    }
    if (const auto e = take("mc.seed")) {
        cfg.mc.seed = parse_seed(e->first, e->second);
    }
    if (const auto e = take("mc.threads")) {
        cfg.mc.threads = static_cast<int>(parse_integer(e->first, e->second));
    }

    SweepBlock sweep;
    bool have_sweep = false;
    if (const auto e = take("sweep.parameter")) {
        sweep.parameter = e->first;
        have_sweep = true;
    }
    const bool have_start = entries.count("sweep.start") > 0;
    number("sweep.start", sweep.start);
    const bool have_stop = entries.count("sweep.stop") > 0;
    number("sweep.stop", sweep.stop);
    bool have_points = false;
    if (const auto e = take("sweep.points")) {
        sweep.points = static_cast<int>(parse_integer(e->first, e->second));
        have_points = true;
    }
    if (have_sweep) {
        check(have_start, "sweep.parameter", "sweep.start is required");
        check(have_stop, "sweep.parameter", "sweep.stop is required");
        check(have_points, "sweep.parameter", "sweep.points is required");
        check(sweep.points >= 1, "sweep.points", "must be >= 1");
        cfg.sweep = sweep;
    } else if (have_start || have_stop || have_points) {
        throw ScenarioError(0, "sweep.start/stop/points given without sweep.parameter");
    }

    number("swap.r01", cfg.swap.r01);
    number("swap.r23", cfg.swap.r23);
    number("calibration.gyromagnetic_hz_per_gauss", cfg.gyromagnetic_hz_per_gauss);

    if (!entries.empty()) {
        const auto& [key, entry] = *entries.begin();
        throw ScenarioError(entry.second, "unknown key '" + key + "'");
    }

    // Physicality checks, anchored to the offending line where possible.
    check(cfg.params.n_atoms >= 1.0, "n_atoms", "must be >= 1");
    check(!(cfg.params.cooperativity < 0.0) && !std::isnan(cfg.params.cooperativity),
          "cooperativity", "must be >= 0");
    check(cfg.gamma0_hz > 0.0 && std::isfinite(cfg.gamma0_hz), "gamma0_hz", "must be positive");
    check(cfg.params.squeezing_r >= 0.0 && std::isfinite(cfg.params.squeezing_r), "squeezing_r",
          "must be finite and >= 0");
    check(std::isfinite(cfg.params.gain_g), "gain_g", "must be finite");
    check(cfg.input.var_x > 0.0, "input.var_x", "must be positive");
    check(cfg.input.var_y > 0.0, "input.var_y", "must be positive");
    if (!is_physical(cfg.input)) {
        int line = line_of("input.var_x");
        if (line == 0) {
            line = line_of("input.var_y");
        }
        if (line == 0) {
            line = line_of("input.cov_xy");
        }
        throw ScenarioError(line,
                            "input state violates var_x*var_y - cov_xy^2 >= 1 (unphysical)");
    }
    check(cfg.mc.dt > 0.0 && std::isfinite(cfg.mc.dt), "mc.dt", "must be positive");
    check(cfg.mc.t_max > 0.0 && std::isfinite(cfg.mc.t_max), "mc.t_max", "must be positive");
    check(cfg.mc.n_traj >= 2, "mc.n_traj", "must be >= 2");
    check(cfg.mc.threads >= 0, "mc.threads", "must be >= 0");
    check(cfg.swap.r01 >= 0.0, "swap.r01", "must be >= 0");
    check(cfg.swap.r23 >= 0.0, "swap.r23", "must be >= 0");
    check(cfg.gyromagnetic_hz_per_gauss > 0.0, "calibration.gyromagnetic_hz_per_gauss",
          "must be positive");

    cfg.params.gamma0 = 2.0 * std::numbers::pi * cfg.gamma0_hz;
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(0, "cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

} // namespace spinport
