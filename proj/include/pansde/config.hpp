#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pansde/common.hpp"
#include "pansde/model.hpp"

namespace pansde::cli {

/// Parsed experiment configuration: flat "key = value" text with one section
/// per subcommand. All keys are validated; unknown keys are errors. The seed
/// must be given explicitly (file or --seed flag); there is no wall-clock
/// default.
struct ExperimentConfig {
    // Problem selection ("linear", "drift_only", "ou") and coefficients.
    std::string problem = "linear";
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double sigma = 0.0;
    double q = 0.0;
    double x0 = 1.0;
    bool has_a = false, has_b = false, has_c = false, has_d = false;
    bool has_sigma = false, has_q = false;

    // Scheme and run harness.
    double theta = 0.5;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int workers = 0;  // 0 = hardware default
    double implicit_tolerance = 1e-12;
    int max_iterations = 50;

    // [simulate]
    int sim_steps = 0;
    int sim_paths = 0;
    std::string sim_output = "mean-square";  // or "trajectories"

    // [convergence]
    std::vector<int> conv_steps;
    int conv_paths = 0;
    int conv_fine_factor = 16;

    // [consistency]
    std::vector<int> cons_steps;
    int cons_paths = 0;
    double cons_anchor = 0.5;
    double cons_fraction = 1.0;
    bool cons_antithetic = true;
    bool cons_scan_all = false;
    int cons_fine_factor = 16;

    // [stability-fit]
    int fit_steps = 0;
    int fit_paths = 0;
    double fit_tail_low = 0.0;  // 0 = horizon / 10
    int fit_tail_samples = 24;

    /// Echo of every parsed "section.key = value" pair, insertion-ordered,
    /// for the CSV metadata block.
    std::vector<std::pair<std::string, std::string>> echo;
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::string& path);

/// Per-command presence and range validation; throws ConfigError naming the
/// offending key.
void validate_config(const ExperimentConfig& config, std::string_view command);

/// Instantiates the named built-in problem from the config coefficients.
SpdeProblem build_problem(const ExperimentConfig& config);

}  // namespace pansde::cli
