#include <doctest.h>

#include <cmath>
#include <vector>

#include "pansde/oracle.hpp"

using namespace pansde;

namespace {

// Independent root finder for drift_coef + delay_coef * q^alpha = 0.
double bisect_decay_exponent(double drift_coef, double delay_coef, double q) {
    const auto residual = [&](double alpha) {
        return drift_coef + delay_coef * std::pow(q, alpha);
    };
    double lo = -60.0, hi = 60.0;
    REQUIRE(residual(lo) * residual(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (residual(lo) * residual(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("series coefficients follow the term-matching recurrence") {
    const PantographSeries series(-1.0, 0.5, 0.5, 1.0);
    const auto coeffs = series.coefficients();
    CHECK(coeffs[0] == 1.0);
    // c_{k+1} = (-1 + 0.5 * 0.5^k) c_k / (k+1), worked by hand:
    CHECK(coeffs[1] == -0.5);
    CHECK(coeffs[2] == 0.1875);
    CHECK(coeffs[3] == -0.0546875);

    // The recurrence holds exactly for every stored coefficient.
    double ratio_pow = 1.0;
    for (int k = 0; k + 1 < static_cast<int>(coeffs.size()); ++k) {
        CHECK(coeffs[static_cast<std::size_t>(k) + 1] ==
              (-1.0 + 0.5 * ratio_pow) * coeffs[static_cast<std::size_t>(k)] / (k + 1));
        ratio_pow *= 0.5;
    }
}

TEST_CASE("series evaluation") {
    SUBCASE("t = 0 returns x0") {
        CHECK(series_solve(-1.0, 0.5, 0.5, 3.5, 0.0, 1e-14) == 3.5);
    }
    SUBCASE("delay_coef = 0 reduces to the exponential") {
        for (const double t : {0.1, 0.7, 2.0, 5.0}) {
            CHECK(series_solve(-0.8, 0.0, 0.5, 2.0, t, 1e-15) ==
                  doctest::Approx(2.0 * std::exp(-0.8 * t)).epsilon(1e-12));
        }
    }
    SUBCASE("rejects non-positive tolerance") {
        CHECK_THROWS_AS(series_solve(-1.0, 0.5, 0.5, 1.0, 1.0, 0.0), Error);
        CHECK_THROWS_AS(series_solve(-1.0, 0.5, 0.5, 1.0, 1.0, -1e-10), Error);
    }
    SUBCASE("solves the equation: derivative matches the right side") {
        const PantographSeries series(-1.0, 0.5, 0.5, 1.0);
        const double t = 0.8;
        const double eps = 1e-6;
        const double derivative =
            (series.evaluate(t + eps) - series.evaluate(t - eps)) / (2.0 * eps);
        const double rhs = -series.evaluate(t) + 0.5 * series.evaluate(0.5 * t);
        CHECK(derivative == doctest::Approx(rhs).epsilon(1e-7));
    }
}

TEST_CASE("deterministic decay exponent") {
    CHECK(decay_exponent_det(-1.0, 1.0, 0.5) == 0.0);
    CHECK(decay_exponent_det(-2.0, 1.0, 0.5) == -1.0);
    CHECK(decay_exponent_det(-3.0, 1.0, 0.5) ==
          doctest::Approx(-std::log2(3.0)).epsilon(1e-14));

    SUBCASE("cross-check against bisection and the defining equation") {
        const double cases[][3] = {
            {-3.0, 1.0, 0.5}, {-0.7, 0.2, 0.3}, {-2.5, 1.7, 0.8}, {-1.1, 1.05, 0.6}};
        for (const auto& c : cases) {
            const double alpha = decay_exponent_det(c[0], c[1], c[2]);
            CHECK(std::abs(c[0] + c[1] * std::pow(c[2], alpha)) < 1e-12);
            CHECK(alpha == doctest::Approx(bisect_decay_exponent(c[0], c[1], c[2]))
                               .epsilon(1e-10));
        }
    }
    SUBCASE("sign preconditions") {
        CHECK_THROWS_AS(decay_exponent_det(1.0, 1.0, 0.5), Error);
        CHECK_THROWS_AS(decay_exponent_det(-1.0, -1.0, 0.5), Error);
    }
}

TEST_CASE("envelope check classifies decay rates") {
    const double abar = -2.0, bbar = 1.0, q = 0.5;  // alpha = -1
    const double alpha = decay_exponent_det(abar, bbar, q);
    std::vector<double> times;
    for (double t = 0.5; t <= 40.0; t *= 1.2) times.push_back(t);

    SUBCASE("faster decay passes") {
        std::vector<double> values;
        for (const double t : times) values.push_back(std::pow(t, alpha - 0.1));
        CHECK(envelope_check(times, values, abar, bbar, q).holds);
    }
    SUBCASE("slower decay fails on a long grid") {
        std::vector<double> values;
        for (const double t : times) values.push_back(std::pow(t, alpha + 0.5));
        const EnvelopeVerdict verdict = envelope_check(times, values, abar, bbar, q);
        CHECK_FALSE(verdict.holds);
        CHECK(verdict.margin > 1.0);
    }
    SUBCASE("all-zero samples are rejected") {
        const std::vector<double> zeros(times.size(), 0.0);
        CHECK_THROWS_AS(envelope_check(times, zeros, abar, bbar, q), Error);
    }
}

TEST_CASE("ou second moment") {
    CHECK(ou_second_moment(-1.0, 1.0, 2.0, 0.0) == 4.0);
    CHECK(ou_second_moment(-0.5, 0.0, 1.5, 2.0) ==
          doctest::Approx(1.5 * 1.5 * std::exp(-2.0)).epsilon(1e-14));

    const double expected = std::exp(-2.0) + 0.5 * (1.0 - std::exp(-2.0));
    CHECK(ou_second_moment(-1.0, 1.0, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));

    SUBCASE("a = 0 limit is continuous") {
        const double at_zero = ou_second_moment(0.0, 1.3, 0.7, 2.5);
        CHECK(at_zero == doctest::Approx(0.7 * 0.7 + 1.3 * 1.3 * 2.5).epsilon(1e-14));
        CHECK(ou_second_moment(1e-8, 1.3, 0.7, 2.5) ==
              doctest::Approx(at_zero).epsilon(1e-6));
        CHECK(ou_second_moment(-1e-8, 1.3, 0.7, 2.5) ==
              doctest::Approx(at_zero).epsilon(1e-6));
    }
}
