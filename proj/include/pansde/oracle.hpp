#pragma once

#include <span>
#include <vector>

#include "pansde/common.hpp"

namespace pansde {

/// Power-series solution of the deterministic pantograph equation
///   x'(t) = drift_coef * x(t) + delay_coef * x(ratio * t),  x(0) = x0.
/// The solution is entire; coefficients obey
///   c_{k+1} = (drift_coef + delay_coef * ratio^k) * c_k / (k + 1).
class PantographSeries {
public:
    static constexpr int kMaxTerms = 200;

    PantographSeries(double drift_coef, double delay_coef, double ratio, double x0);

    /// Truncated sum; stops once two consecutive terms fall below
    /// tol * (1 + |partial sum|) while decreasing in magnitude.
    double evaluate(double t, double tol = 1e-14) const;

    std::span<const double> coefficients() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

/// Convenience wrapper around PantographSeries::evaluate.
double series_solve(double drift_coef, double delay_coef, double ratio, double x0, double t,
                    double tol);

/// The real decay exponent of the deterministic pantograph equation, i.e. the
/// root of drift_coef + delay_coef * ratio^alpha = 0. Requires drift_coef < 0
/// and delay_coef > 0.
double decay_exponent_det(double drift_coef, double delay_coef, double ratio);

struct EnvelopeVerdict {
    bool holds = false;
    double margin = 0.0;    // max tail value of p(t) / (C t^alpha); holds iff <= 1
    double constant = 0.0;  // fitted C
    double alpha = 0.0;
};

/// Checks a sampled non-negative function against the comparison envelope
/// C * t^alpha: C is fitted as the max of p(t)/t^alpha over t in [1, 2] and
/// the bound is tested on every sample with t > 2.
EnvelopeVerdict envelope_check(std::span<const double> times, std::span<const double> values,
                               double drift_coef, double delay_coef, double ratio);

/// Exact E|x(T)|^2 for dx = a x dt + sigma dB, x(0) = x0 deterministic:
/// x0^2 e^{2aT} + sigma^2 (e^{2aT} - 1) / (2a), with the a -> 0 limit
/// x0^2 + sigma^2 T taken explicitly.
double ou_second_moment(double a, double sigma, double x0, double horizon);

}  // namespace pansde
