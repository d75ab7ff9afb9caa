#pragma once

#include <filesystem>
#include <iosfwd>

#include "pansde/analysis.hpp"
#include "pansde/config.hpp"

namespace pansde::cli {

/// Pure analysis (Theorem-level predicates plus alpha); writes analyze.csv.
StabilityReport run_analyze(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir, std::ostream& log);

/// Integrates an ensemble; writes one trajectory CSV per path or the ensemble
/// mean-square curve, depending on [simulate] output.
void run_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& log);

/// Strong-order study; writes convergence.csv.
StrongErrorResult run_convergence(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log);

/// Consistency-order study; writes consistency_mean.csv and
/// consistency_rms.csv.
ConsistencyResult run_consistency(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log);

/// Ensemble mean-square decay fit against the closed-form exponent; writes
/// stability_fit.csv.
StabilityReport run_stability_fit(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log);

/// Quick built-in checks; returns the number of failures.
int run_self_test(std::uint64_t seed, int workers, std::ostream& log);

/// Full command-line entry point. Exit codes: 0 success, 2 config error,
/// 3 numerical failure, 4 self-test assertion failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pansde::cli
