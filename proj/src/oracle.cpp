#include "pansde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pansde {

PantographSeries::PantographSeries(double drift_coef, double delay_coef, double ratio,
                                   double x0) {
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "PantographSeries: ratio must lie in (0, 1)");
    coeffs_.resize(kMaxTerms + 1);
    coeffs_[0] = x0;
    double ratio_pow = 1.0;  // ratio^k
    for (int k = 0; k < kMaxTerms; ++k) {
        coeffs_[static_cast<std::size_t>(k) + 1] =
            (drift_coef + delay_coef * ratio_pow) * coeffs_[static_cast<std::size_t>(k)] /
            static_cast<double>(k + 1);
        ratio_pow *= ratio;
    }
}

double PantographSeries::evaluate(double t, double tol) const {
    require(tol > 0.0, ErrorCode::InvalidArgument, "series: tolerance must be positive");
    require(t >= 0.0, ErrorCode::InvalidArgument, "series: time must be non-negative");

    double sum = coeffs_[0];
    double power = 1.0;
    double prev_term = std::abs(coeffs_[0]);
    for (int k = 1; k <= kMaxTerms; ++k) {
        power *= t;
        const double term = coeffs_[static_cast<std::size_t>(k)] * power;
        sum += term;
        const double threshold = tol * (1.0 + std::abs(sum));
        if (std::abs(term) < threshold && prev_term < threshold &&
            std::abs(term) <= prev_term) {
            break;
        }
        prev_term = std::abs(term);
    }
    return sum;
}

double series_solve(double drift_coef, double delay_coef, double ratio, double x0, double t,
                    double tol) {
    return PantographSeries(drift_coef, delay_coef, ratio, x0).evaluate(t, tol);
}

double decay_exponent_det(double drift_coef, double delay_coef, double ratio) {
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "decay_exponent_det: ratio must lie in (0, 1)");
    require(drift_coef < 0.0 && delay_coef > 0.0, ErrorCode::NoRealRoot,
            "decay_exponent_det: needs drift_coef < 0 < delay_coef for a real exponent");
    return std::log(-drift_coef / delay_coef) / std::log(ratio);
}

EnvelopeVerdict envelope_check(std::span<const double> times, std::span<const double> values,
                               double drift_coef, double delay_coef, double ratio) {
    require(times.size() == values.size() && !times.empty(), ErrorCode::InvalidArgument,
            "envelope_check: times and values must align and be non-empty");
    bool any_nonzero = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(i == 0 || times[i] > times[i - 1], ErrorCode::InvalidArgument,
                "envelope_check: times must be strictly increasing");
        require(values[i] >= 0.0, ErrorCode::InvalidArgument,
                "envelope_check: values must be non-negative");
        if (values[i] > 0.0) any_nonzero = true;
    }
    require(any_nonzero, ErrorCode::InvalidArgument, "envelope_check: all samples are zero");

    EnvelopeVerdict verdict;
    verdict.alpha = decay_exponent_det(drift_coef, delay_coef, ratio);

    double fitted = 0.0;
    bool window_seen = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= 1.0 && times[i] <= 2.0) {
            fitted = std::max(fitted, values[i] / std::pow(times[i], verdict.alpha));
            window_seen = true;
        }
    }
    require(window_seen, ErrorCode::InvalidArgument,
            "envelope_check: no samples in the fit window [1, 2]");
    verdict.constant = fitted;

    double margin = 0.0;
    bool tail_seen = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > 2.0) {
            const double envelope = fitted * std::pow(times[i], verdict.alpha);
            margin = std::max(margin, envelope > 0.0
                                          ? values[i] / envelope
                                          : (values[i] > 0.0
                                                 ? std::numeric_limits<double>::infinity()
                                                 : 0.0));
            tail_seen = true;
        }
    }
    require(tail_seen, ErrorCode::InvalidArgument,
            "envelope_check: no samples beyond the fit window (t > 2)");
    verdict.margin = margin;
    verdict.holds = margin <= 1.0 + 1e-9;
    return verdict;
}

double ou_second_moment(double a, double sigma, double x0, double horizon) {
    require(horizon >= 0.0, ErrorCode::InvalidArgument,
            "ou_second_moment: horizon must be non-negative");
    if (a == 0.0) return x0 * x0 + sigma * sigma * horizon;
    const double growth = std::exp(2.0 * a * horizon);
    return x0 * x0 * growth + sigma * sigma * std::expm1(2.0 * a * horizon) / (2.0 * a);
}

}  // namespace pansde
