#include <doctest.h>

#include <cmath>
#include <limits>

#include "pansde/mesh.hpp"

using namespace pansde;

TEST_CASE("build_uniform lays out n*h points") {
    const UniformMesh mesh = build_uniform(1.0, 4);
    CHECK(mesh.step == 0.25);
    REQUIRE(mesh.points.size() == 5);
    const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int n = 0; n <= 4; ++n) CHECK(mesh.point(n) == expect[n]);

    const UniformMesh wide = build_uniform(2.0, 8);
    CHECK(wide.step == 0.25);
    CHECK(wide.point(3) == 0.75);
}

TEST_CASE("build_uniform rejects bad parameters") {
    CHECK_THROWS_AS(build_uniform(0.0, 4), Error);
    CHECK_THROWS_AS(build_uniform(-1.0, 4), Error);
    CHECK_THROWS_AS(build_uniform(1.0, 0), Error);
    // h = 1 violates the standing h < 1 assumption.
    CHECK_THROWS_AS(build_uniform(1.0, 1), Error);
    CHECK_THROWS_AS(build_uniform(8.0, 4), Error);
}

TEST_CASE("refine merges grid and delayed points") {
    SUBCASE("q = 0.5 on N = 4") {
        const RefinedMesh mesh = refine(build_uniform(1.0, 4), 0.5);
        const double expect[] = {0.0, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0};
        REQUIRE(mesh.size() == 7);
        for (int l = 0; l < mesh.size(); ++l) CHECK(mesh.point(l) == doctest::Approx(expect[l]).epsilon(1e-15));
    }
    SUBCASE("q = 0.9 keeps off-grid delayed points with locators") {
        const RefinedMesh mesh = refine(build_uniform(1.0, 4), 0.9);
        const int idx = mesh.index_of(0.225);
        REQUIRE(idx >= 0);
        const IntervalLocator loc = mesh.locators[static_cast<std::size_t>(idx)];
        CHECK(loc.interval == 0);
        CHECK(loc.fraction == doctest::Approx(0.9).epsilon(1e-12));
    }
    SUBCASE("tags distinguish delayed-only from coinciding points") {
        const RefinedMesh mesh = refine(build_uniform(1.0, 2), 0.5);
        REQUIRE(mesh.size() == 4);
        CHECK(mesh.point(1) == 0.25);
        CHECK(mesh.kinds[1] == PointKind::Delayed);
        CHECK(mesh.kinds[2] == PointKind::Both);  // 0.5 = t_1 = q * t_2
        CHECK(mesh.kinds[3] == PointKind::Grid);
    }
    SUBCASE("rejects ratios outside (0,1)") {
        const UniformMesh base = build_uniform(1.0, 4);
        CHECK_THROWS_AS(refine(base, 0.0), Error);
        CHECK_THROWS_AS(refine(base, 1.0), Error);
        CHECK_THROWS_AS(refine(base, -0.5), Error);
        CHECK_THROWS_AS(refine(base, 1.5), Error);
    }
}

TEST_CASE("locate uses index arithmetic with a snap") {
    const RefinedMesh mesh = refine(build_uniform(1.0, 4), 0.5);
    SUBCASE("interior point") {
        const IntervalLocator loc = mesh.locate(0.375);
        CHECK(loc.interval == 1);
        CHECK(loc.fraction == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("grid points map to the left interval with fraction 1") {
        const IntervalLocator loc = mesh.locate(0.25);
        CHECK(loc.interval == 0);
        CHECK(loc.fraction == 1.0);
    }
    SUBCASE("non-mesh point and zero are rejected") {
        CHECK_THROWS_AS(mesh.locate(0.13), Error);
        CHECK_THROWS_AS(mesh.locate(0.0), Error);
    }
}

TEST_CASE("refined mesh invariants hold across parameters") {
    const double ratios[] = {0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
    const int counts[] = {1, 2, 4, 7, 16, 33};
    for (const double q : ratios) {
        for (const int n_steps : counts) {
            CAPTURE(q);
            CAPTURE(n_steps);
            const RefinedMesh mesh = refine(build_uniform(0.9, n_steps), q);

            CHECK(mesh.size() >= n_steps + 1);
            CHECK(mesh.size() <= 2 * n_steps + 1);
            CHECK(mesh.point(0) == 0.0);
            CHECK(mesh.point(mesh.size() - 1) == mesh.base.horizon);
            for (int l = 1; l < mesh.size(); ++l) {
                CHECK(mesh.point(l) > mesh.point(l - 1));
            }

            // Locator round trip within two units of rounding.
            const double h = mesh.base.step;
            for (int l = 1; l < mesh.size(); ++l) {
                const IntervalLocator loc = mesh.locators[static_cast<std::size_t>(l)];
                CHECK(loc.fraction > 0.0);
                CHECK(loc.fraction <= 1.0);
                const double rebuilt = mesh.base.point(loc.interval) + loc.fraction * h;
                CHECK(std::abs(rebuilt - mesh.point(l)) <=
                      2.0 * std::numeric_limits<double>::epsilon() *
                          std::max(1.0, std::abs(mesh.point(l))));
            }

            // Every grid and every delayed point is represented.
            for (int n = 0; n <= n_steps; ++n) {
                CHECK(mesh.grid_index[static_cast<std::size_t>(n)] >= 0);
                CHECK(mesh.delayed_index[static_cast<std::size_t>(n)] >= 0);
                CHECK(mesh.point(mesh.grid_index[static_cast<std::size_t>(n)]) ==
                      doctest::Approx(mesh.base.point(n)).epsilon(1e-12));
                CHECK(mesh.point(mesh.delayed_index[static_cast<std::size_t>(n)]) ==
                      doctest::Approx(q * mesh.base.point(n)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("coupling window predicate matches the direct comparison") {
    const double ratios[] = {0.25, 0.5, 0.75, 0.9};
    for (const double q : ratios) {
        const UniformMesh mesh = build_uniform(0.9, 24);
        for (int n = 0; n < mesh.step_count; ++n) {
            CAPTURE(q);
            CAPTURE(n);
            // Exact coincidences q * t_{n+1} = t_n are snapped by the mesh, so
            // only assert agreement away from the boundary.
            if (std::abs(q * (n + 1) - n) <= 1e-9) continue;
            const bool direct = q * mesh.point(n + 1) > mesh.point(n);
            CHECK(coupling_step(n, q) == direct);
            CHECK(coupling_step(n, q) ==
                  (static_cast<double>(n) < q / (1.0 - q)));
        }
        // For q <= 1/2 the delayed argument never leads the interval after n = 0.
        if (q <= 0.5) {
            for (int n = 1; n < 24; ++n) CHECK_FALSE(coupling_step(n, q));
        }
    }
}
