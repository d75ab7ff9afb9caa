#include "pansde/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pansde::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void config_fail(const std::string& message) {
    fail(ErrorCode::ConfigError, "config: " + message);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(parsed)) config_fail("bad number for " + key);
        return parsed;
    } catch (const std::exception&) {
        config_fail("bad number for " + key + ": '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    long parsed = 0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        config_fail("bad integer for " + key + ": '" + value + "'");
    }
    return parsed;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t parsed = 0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        config_fail("bad unsigned integer for " + key + ": '" + value + "'");
    }
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    config_fail("bad boolean for " + key + ": '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> items;
    std::stringstream stream(value);
    std::string cell;
    while (std::getline(stream, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty()) config_fail("empty entry in list " + key);
        items.push_back(static_cast<int>(parse_long(key, t)));
    }
    if (items.empty()) config_fail("empty list for " + key);
    return items;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig cfg;
    static const std::set<std::string> known_sections = {
        "", "analyze", "simulate", "convergence", "consistency", "stability-fit",
        "self-test"};

    std::string section;
    std::istringstream stream{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_fail("unterminated section header at line " +
                                                std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.count(section)) config_fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            config_fail("expected 'key = value' at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            config_fail("empty key or value at line " + std::to_string(line_no));
        }
        cfg.echo.emplace_back(section.empty() ? key : section + "." + key, value);

        bool known = true;
        if (section.empty()) {
            if (key == "problem") {
                cfg.problem = value;
            } else if (key == "a") {
                cfg.a = parse_double(key, value);
                cfg.has_a = true;
            } else if (key == "b") {
                cfg.b = parse_double(key, value);
                cfg.has_b = true;
            } else if (key == "c") {
                cfg.c = parse_double(key, value);
                cfg.has_c = true;
            } else if (key == "d") {
                cfg.d = parse_double(key, value);
                cfg.has_d = true;
            } else if (key == "sigma") {
                cfg.sigma = parse_double(key, value);
                cfg.has_sigma = true;
            } else if (key == "q") {
                cfg.q = parse_double(key, value);
                cfg.has_q = true;
            } else if (key == "x0") {
                cfg.x0 = parse_double(key, value);
            } else if (key == "theta") {
                cfg.theta = parse_double(key, value);
            } else if (key == "T") {
                cfg.horizon = parse_double(key, value);
            } else if (key == "seed") {
                cfg.seed = parse_u64(key, value);
                cfg.has_seed = true;
            } else if (key == "workers") {
                cfg.workers = static_cast<int>(parse_long(key, value));
            } else if (key == "implicit_tolerance") {
                cfg.implicit_tolerance = parse_double(key, value);
            } else if (key == "max_iterations") {
                cfg.max_iterations = static_cast<int>(parse_long(key, value));
            } else {
                known = false;
            }
        } else if (section == "simulate") {
            if (key == "N") {
                cfg.sim_steps = static_cast<int>(parse_long(key, value));
            } else if (key == "paths") {
                cfg.sim_paths = static_cast<int>(parse_long(key, value));
            } else if (key == "output") {
                cfg.sim_output = value;
            } else {
                known = false;
            }
        } else if (section == "convergence") {
            if (key == "N_list") {
                cfg.conv_steps = parse_int_list(key, value);
            } else if (key == "paths") {
                cfg.conv_paths = static_cast<int>(parse_long(key, value));
            } else if (key == "fine_factor") {
                cfg.conv_fine_factor = static_cast<int>(parse_long(key, value));
            } else {
                known = false;
            }
        } else if (section == "consistency") {
            if (key == "N_list") {
                cfg.cons_steps = parse_int_list(key, value);
            } else if (key == "paths") {
                cfg.cons_paths = static_cast<int>(parse_long(key, value));
            } else if (key == "anchor") {
                cfg.cons_anchor = parse_double(key, value);
            } else if (key == "zeta") {
                cfg.cons_fraction = parse_double(key, value);
            } else if (key == "antithetic") {
                cfg.cons_antithetic = parse_bool(key, value);
            } else if (key == "scan_all") {
                cfg.cons_scan_all = parse_bool(key, value);
            } else if (key == "fine_factor") {
                cfg.cons_fine_factor = static_cast<int>(parse_long(key, value));
            } else {
                known = false;
            }
        } else if (section == "stability-fit") {
            if (key == "N") {
                cfg.fit_steps = static_cast<int>(parse_long(key, value));
            } else if (key == "paths") {
                cfg.fit_paths = static_cast<int>(parse_long(key, value));
            } else if (key == "tail_low") {
                cfg.fit_tail_low = parse_double(key, value);
            } else if (key == "tail_samples") {
                cfg.fit_tail_samples = static_cast<int>(parse_long(key, value));
            } else {
                known = false;
            }
        } else {
            // [analyze] and [self-test] take no keys.
            known = false;
        }
        if (!known) {
            config_fail("unknown key '" + key + "'" +
                        (section.empty() ? "" : " in section [" + section + "]"));
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

namespace {

void validate_problem_keys(const ExperimentConfig& c) {
    if (c.problem == "linear" || c.problem == "drift_only") {
        if (!c.has_a) config_fail("missing coefficient a");
        if (!c.has_b) config_fail("missing coefficient b");
        if (c.problem == "linear") {
            if (!c.has_c) config_fail("missing coefficient c");
            if (!c.has_d) config_fail("missing coefficient d");
        }
        if (!c.has_q) config_fail("missing delay ratio q");
        if (!(c.q > 0.0 && c.q < 1.0)) config_fail("q must lie in (0, 1)");
    } else if (c.problem == "ou") {
        if (!c.has_a) config_fail("missing coefficient a");
        if (!c.has_sigma) config_fail("missing coefficient sigma");
        if (c.has_q && !(c.q > 0.0 && c.q < 1.0)) config_fail("q must lie in (0, 1)");
    } else {
        config_fail("unknown problem '" + c.problem + "' (expected linear|drift_only|ou)");
    }
}

void validate_harness(const ExperimentConfig& c) {
    if (!c.has_seed) config_fail("missing seed (set it in the config or pass --seed)");
    if (!(c.theta >= 0.0 && c.theta <= 1.0)) config_fail("theta must lie in [0, 1]");
    if (!(c.horizon > 0.0)) config_fail("T must be positive");
    if (c.workers < 0) config_fail("workers must be >= 0");
    if (!(c.implicit_tolerance > 0.0)) config_fail("implicit_tolerance must be positive");
    if (c.max_iterations < 1) config_fail("max_iterations must be >= 1");
    if (!std::isfinite(c.x0)) config_fail("x0 must be finite");
}

void validate_step_list(const std::vector<int>& steps, const char* key) {
    if (steps.size() < 3) config_fail(std::string(key) + " needs at least 3 entries");
    for (const int n : steps) {
        if (n < 1) config_fail(std::string(key) + " entries must be positive");
    }
}

}  // namespace

void validate_config(const ExperimentConfig& config, std::string_view command) {
    validate_harness(config);
    validate_problem_keys(config);

    if (command == "analyze") {
        if (config.problem != "linear") {
            config_fail("analyze needs the linear problem (declared a, b, c, d)");
        }
        if (!(config.b > 0.0 && config.c > 0.0 && config.d > 0.0)) {
            config_fail("analyze needs b, c, d > 0");
        }
    } else if (command == "simulate") {
        if (config.sim_steps < 1) config_fail("[simulate] N must be >= 1");
        if (config.sim_paths < 1) config_fail("[simulate] paths must be >= 1");
        if (config.sim_output != "mean-square" && config.sim_output != "trajectories") {
            config_fail("[simulate] output must be mean-square or trajectories");
        }
    } else if (command == "convergence") {
        validate_step_list(config.conv_steps, "[convergence] N_list");
        if (config.conv_paths < 1) config_fail("[convergence] paths must be >= 1");
        if (config.conv_fine_factor < 2) config_fail("[convergence] fine_factor must be >= 2");
    } else if (command == "consistency") {
        validate_step_list(config.cons_steps, "[consistency] N_list");
        if (config.cons_paths < 1) config_fail("[consistency] paths must be >= 1");
        if (config.cons_antithetic && config.cons_paths % 2 != 0) {
            config_fail("[consistency] antithetic pairing needs an even path count");
        }
        if (!(config.cons_anchor > 0.0 && config.cons_anchor < config.horizon)) {
            config_fail("[consistency] anchor must lie in (0, T)");
        }
        if (!(config.cons_fraction > 0.0 && config.cons_fraction <= 1.0)) {
            config_fail("[consistency] zeta must lie in (0, 1]");
        }
        if (config.cons_fine_factor < 2) config_fail("[consistency] fine_factor must be >= 2");
    } else if (command == "stability-fit") {
        if (config.fit_steps < 1) config_fail("[stability-fit] N must be >= 1");
        if (config.fit_paths < 1) config_fail("[stability-fit] paths must be >= 1");
        if (config.fit_tail_samples < 8) {
            config_fail("[stability-fit] tail_samples must be >= 8");
        }
        const double tail_low =
            config.fit_tail_low > 0.0 ? config.fit_tail_low : config.horizon / 10.0;
        if (!(tail_low > 1.0 && tail_low < config.horizon)) {
            config_fail("[stability-fit] tail window must start above t = 1");
        }
    } else if (command == "self-test") {
        // no extra keys
    } else {
        config_fail("unknown command '" + std::string(command) + "'");
    }
}

SpdeProblem build_problem(const ExperimentConfig& config) {
    if (config.problem == "linear") {
        return make_linear(config.a, config.b, config.c, config.d, config.q, config.x0);
    }
    if (config.problem == "drift_only") {
        return make_drift_only(config.a, config.b, config.q, config.x0);
    }
    if (config.problem == "ou") {
        return make_ou(config.a, config.sigma, config.x0, config.has_q ? config.q : 0.5);
    }
    config_fail("unknown problem '" + config.problem + "'");
}

}  // namespace pansde::cli
