#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pansde/common.hpp"
#include "pansde/model.hpp"
#include "pansde/scheme.hpp"

namespace pansde {

/// Least-squares fit of log(error) against log(step): errors ~ C * h^slope.
struct OrderFit {
    std::vector<double> step_sizes;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;       // log C
    double residual_norm = 0.0;   // RMS of log-space fit residuals
    double slope_stderr = 0.0;
    double slope_ci95 = 0.0;      // half-width, Student-t
};

/// Fits an order through >= 3 (step, error) pairs, all positive. A zero error
/// rejects the fit with ZERO_ERROR.
OrderFit fit_order(std::span<const double> step_sizes, std::span<const double> errors);

/// Mean-square decay exponent: the root of
///   2a + b + 2c^2 + (b + 2d^2) q^alpha = 0.
/// Requires b + 2d^2 > 0 and 2a + b + 2c^2 < 0; otherwise NO_REAL_ROOT.
double alpha_ms(double a, double b, double c, double d, double ratio);

/// Mean-square polynomial stability sufficient condition a + b + c^2 + d^2 < 0
/// (strict). Requires b, c, d > 0.
bool check_ms_stable(double a, double b, double c, double d);

struct AsVerdict {
    bool stable = false;
    double rate = 0.0;  // (1 + alpha)/2, meaningful when stable
};

/// Almost-sure polynomial stability sufficient condition
/// 2a + b + 2c^2 + (b + 2d^2)/q < 0, with the pathwise rate (1 + alpha)/2.
AsVerdict check_as_stable(double a, double b, double c, double d, double ratio);

/// Log-log least-squares slope of a sampled decay curve on a tail window.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool noise_floor = false;  // nonpositive samples were dropped
    int samples_used = 0;
};

/// Slope of log(values) vs log(times); times must exceed 1. Nonpositive
/// values are dropped and flagged.
DecayFit fit_ms_decay(std::span<const double> times, std::span<const double> values);

/// Same fit for a single path's |y(t)|; diagnostic only.
DecayFit fit_pathwise_decay(std::span<const double> times, std::span<const double> values);

/// Analytic stability verdicts plus the optional empirically fitted slope.
struct StabilityReport {
    bool ms_stable = false;
    bool as_stable = false;
    bool has_alpha = false;
    double alpha = 0.0;
    double as_rate = 0.0;
    std::optional<double> fitted_ms_slope;
    double fit_window_low = 0.0;
    double fit_window_high = 0.0;
    int path_count = 0;
};

/// Predicates and closed-form alpha in one record. A missing real root is
/// reported through has_alpha = false rather than an error.
StabilityReport make_stability_report(double a, double b, double c, double d, double ratio);

struct StrongErrorParams {
    double horizon = 1.0;
    std::vector<int> step_counts;  // coarse N per step size, each dividing the next scale
    int fine_factor = 16;          // reference N = max(step_counts) * fine_factor
    int paths = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    SchemeConfig scheme;
};

struct StrongErrorResult {
    OrderFit fit;                           // h vs max-over-points RMS error
    std::vector<double> stderrs;            // per h, at the maximizing point
    std::vector<double> comparison_times;   // shared refined points
};

/// Strong error study: for each coarse step size, the worst RMS distance to
/// the fine-reference solution over the shared refined points, on bridged
/// common paths. Fits the strong order through the resulting (h, e) pairs.
StrongErrorResult strong_error(const SpdeProblem& problem, const StrongErrorParams& params);

struct ConsistencyParams {
    double horizon = 1.0;          // defines h = horizon / N
    std::vector<int> step_counts;
    int fine_factor = 16;
    double anchor_time = 0.5;      // delta sampled at the grid point at/below this time
    double fraction = 1.0;         // zeta
    int paths = 0;
    bool antithetic = true;        // pairs for the average-order estimate
    bool scan_all_steps = false;   // also compute max over every grid anchor
    std::uint64_t seed = 0;
    int workers = 1;
    SchemeConfig scheme;
};

struct ConsistencyResult {
    OrderFit mean_fit;              // |E delta| vs h (possibly on the surviving range)
    OrderFit rms_fit;               // (E |delta|^2)^{1/2} vs h
    std::vector<double> mean_defect;      // per h, all h
    std::vector<double> mean_stderr;
    std::vector<double> rms_defect;
    std::vector<double> rms_stderr;
    bool noise_floor = false;             // some h failed the signal/noise cut
    std::vector<int> surviving;           // indices of h used in mean_fit
    std::vector<double> scan_mean_defect; // max-over-anchors variant, when requested
    std::vector<double> scan_rms_defect;
};

/// Local-defect study (consistency orders): Monte Carlo estimates of
/// |E delta_h| with antithetic pairing and of (E |delta_h|^2)^{1/2}, each
/// fitted log-log in h. Mean estimates drowned by Monte Carlo noise raise the
/// NOISE_FLOOR flag and the mean fit is restricted to the surviving range.
ConsistencyResult consistency_orders(const SpdeProblem& problem,
                                     const ConsistencyParams& params);

}  // namespace pansde
