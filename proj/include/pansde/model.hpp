#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "pansde/common.hpp"

namespace pansde {

/// Drift evaluation f(t, x, x_delayed) -> out (size d). Must be pure: no
/// hidden state, safe for concurrent invocation.
using DriftFn =
    std::function<void(double, const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Diffusion evaluation g(t, x, x_delayed) -> out (d x m).
using DiffusionFn =
    std::function<void(double, const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::MatrixXd&)>;

/// User-declared structural constants for the drift/diffusion pair. They are
/// claims, verifiable only by sampling (verify_constants).
struct StructuralConstants {
    double drift_one_sided = 0.0;   // <x1-x2, f(t,x1,y)-f(t,x2,y)> <= a |x1-x2|^2
    double drift_delay_lip = 0.0;   // |f(t,x,y1)-f(t,x,y2)| <= b |y1-y2|
    double diff_state_lip = 0.0;    // |g(t,x1,y)-g(t,x2,y)| <= c |x1-x2|
    double diff_delay_lip = 0.0;    // |g(t,x,y1)-g(t,x,y2)| <= d |y1-y2|
    double global_lipschitz = 0.0;  // K, joint Lipschitz and linear-growth constant
};

/// One stochastic pantograph problem
///   dx(t) = f(t, x(t), x(q t)) dt + g(t, x(t), x(q t)) dB(t),  x(0) = x0,
/// with 0 < q < 1. Immutable and shareable.
struct SpdeProblem {
    std::string name;
    int state_dim = 1;   // d
    int noise_dim = 1;   // m
    double delay_ratio = 0.5;  // q
    Eigen::VectorXd initial_value;
    DriftFn drift;
    DiffusionFn diffusion;
    StructuralConstants constants;
};

/// Scalar linear test problem: f = a x + b y, g = c x + d y. Declared
/// constants follow from the coefficients; K = 2 max(a^2, b^2, c^2, d^2).
SpdeProblem make_linear(double a, double b, double c, double d, double ratio, double x0 = 1.0);

/// Deterministic reduction g == 0 of the linear problem.
SpdeProblem make_drift_only(double a, double b, double ratio, double x0 = 1.0);

/// No-delay reduction with additive noise: f = a x, g = sigma. Note g(t,0,0)
/// != 0, so this problem has no zero fixed point; it exists as a moment
/// oracle, not a stability case.
SpdeProblem make_ou(double a, double sigma, double x0 = 1.0, double ratio = 0.5);

/// True iff |f(t,0,0)| and |g(t,0,0)| stay below 1e-12 at every sampled time.
/// Rejects an empty sample list.
bool verify_zero_fixed_point(const SpdeProblem& problem, std::span<const double> t_samples);

/// Sampling region for verify_constants. Zero-volume boxes are rejected.
struct SamplingBox {
    double t_min = 0.0;
    double t_max = 1.0;
    double coord_min = -1.0;
    double coord_max = 1.0;
};

/// Worst observed left/right ratios for the four structural inequalities plus
/// the joint Lipschitz and linear-growth bounds. Any ratio > 1 flags a
/// declared-constant violation.
struct ConstantsReport {
    double drift_one_sided = 0.0;
    double drift_delay_lip = 0.0;
    double diff_state_lip = 0.0;
    double diff_delay_lip = 0.0;
    double global_lipschitz = 0.0;
    double linear_growth = 0.0;

    double worst() const;
    bool all_within(double slack = 0.0) const { return worst() <= 1.0 + slack; }
};

/// Draws random (t, x1, x2, y1, y2) tuples in the box and reports the maximum
/// observed violation ratio per inequality.
ConstantsReport verify_constants(const SpdeProblem& problem, const SamplingBox& box, int trials,
                                 std::uint64_t seed);

}  // namespace pansde
