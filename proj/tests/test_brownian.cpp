#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pansde/brownian.hpp"
#include "pansde/mesh.hpp"

using namespace pansde;

TEST_CASE("path starts at zero and memoizes bit-for-bit") {
    BrownianPath path(3, 42);
    CHECK(path.query(0.0).isZero(0.0));

    const Eigen::VectorXd first = path.query(0.3);
    const Eigen::VectorXd second = path.query(0.3);
    for (int i = 0; i < 3; ++i) CHECK(first[i] == second[i]);

    CHECK_THROWS_AS(path.query(-1.0), Error);
    CHECK_THROWS_AS(path.query(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("bridge sampling uses the conditional law") {
    // With B(0) = 0 and B(1) = w known, B(1/2) ~ Normal(w/2, 1/4) per component.
    const int n = 20000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        BrownianPath path(1, 7, static_cast<std::uint64_t>(i));
        const double w = path.query(1.0)(0);
        const double z = path.query(0.5)(0) - 0.5 * w;  // conditional residual
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(0.25).epsilon(0.06));
}

TEST_CASE("increments telescope exactly through stored values") {
    BrownianPath path(2, 11);
    const Eigen::VectorXd whole = path.increment(0.0, 1.0);
    const Eigen::VectorXd left = path.increment(0.0, 0.5);
    const Eigen::VectorXd right = path.increment(0.5, 1.0);
    for (int i = 0; i < 2; ++i) CHECK(whole[i] == left[i] + right[i]);

    const Eigen::VectorXd none = path.increment(0.5, 0.5);
    CHECK(none.isZero(0.0));
    CHECK_THROWS_AS(path.increment(0.7, 0.2), Error);
}

TEST_CASE("presample establishes ascending order and is idempotent") {
    const RefinedMesh mesh = refine(build_uniform(1.0, 4), 0.5);

    BrownianPath path(1, 5);
    path.presample(mesh.points);
    const int count = path.sample_count();
    std::vector<double> values;
    for (const double t : mesh.points) values.push_back(path.query(t)(0));

    path.presample(mesh.points);  // no-op
    CHECK(path.sample_count() == count);
    for (std::size_t i = 0; i < mesh.points.size(); ++i) {
        CHECK(path.query(mesh.points[i])(0) == values[i]);
    }

    const double unsorted[] = {0.5, 0.25};
    CHECK_THROWS_AS(path.presample(unsorted), Error);

    BrownianPath empty_ok(1, 5);
    empty_ok.presample(std::span<const double>{});
    CHECK(empty_ok.sample_count() == 1);  // just B(0)
}

TEST_CASE("refinement keeps coarse values bit-identical") {
    BrownianPath path(1, 99, 3);
    const RefinedMesh coarse = refine(build_uniform(1.0, 8), 0.7);
    path.presample(coarse.points);
    std::vector<double> before;
    for (const double t : coarse.points) before.push_back(path.query(t)(0));

    const RefinedMesh fine = refine(build_uniform(1.0, 16), 0.7);
    path.presample(fine.points);
    const RefinedMesh finer = refine(build_uniform(1.0, 64), 0.7);
    path.presample(finer.points);

    for (std::size_t i = 0; i < coarse.points.size(); ++i) {
        CHECK(path.query(coarse.points[i])(0) == before[i]);
    }
}

TEST_CASE("same seed and query sequence reproduce the path") {
    BrownianPath a(2, 1234, 17);
    BrownianPath b(2, 1234, 17);
    const double times[] = {0.8, 0.2, 0.5, 0.9, 0.85};
    for (const double t : times) {
        const Eigen::VectorXd va = a.query(t);
        const Eigen::VectorXd vb = b.query(t);
        for (int i = 0; i < 2; ++i) CHECK(va[i] == vb[i]);
    }

    // Distinct path indices give different paths.
    BrownianPath c(2, 1234, 18);
    CHECK(c.query(0.8)(0) != a.query(0.8)(0));
}

TEST_CASE("antithetic twin mirrors the path exactly") {
    BrownianPath path(1, 31, 4, false);
    BrownianPath twin(1, 31, 4, true);
    const double times[] = {0.5, 0.25, 0.75, 1.5};
    for (const double t : times) {
        CHECK(path.query(t)(0) == -twin.query(t)(0));
    }
}

TEST_CASE("increment statistics match the Wiener law") {
    const int n = 10000;
    const double dt = 0.37;
    double sum0 = 0.0, sum1 = 0.0, sq0 = 0.0, sq1 = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        BrownianPath path(2, 2024, static_cast<std::uint64_t>(i));
        const Eigen::VectorXd z = path.increment(0.1, 0.1 + dt) / std::sqrt(dt);
        sum0 += z(0);
        sum1 += z(1);
        sq0 += z(0) * z(0);
        sq1 += z(1) * z(1);
        cross += z(0) * z(1);
    }
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum0 / n) < bound);
    CHECK(std::abs(sum1 / n) < bound);
    CHECK(sq0 / n > 0.94);
    CHECK(sq0 / n < 1.06);
    CHECK(sq1 / n > 0.94);
    CHECK(sq1 / n < 1.06);
    CHECK(std::abs(cross / n) < bound);
}
