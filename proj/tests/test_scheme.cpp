#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "pansde/oracle.hpp"
#include "pansde/scheme.hpp"

using namespace pansde;

namespace {

std::shared_ptr<const RefinedMesh> make_mesh(double horizon, int steps, double ratio) {
    return std::make_shared<RefinedMesh>(refine(build_uniform(horizon, steps), ratio));
}

}  // namespace

TEST_CASE("vanishing coefficients keep the state constant at every point") {
    SpdeProblem p = make_linear(0.0, 0.0, 0.0, 0.0, 0.7, 2.5);
    const auto mesh = make_mesh(1.0, 8, 0.7);
    BrownianPath path(1, 5, 0);
    path.presample(mesh->points);
    const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
    for (int l = 0; l < traj.size(); ++l) {
        CHECK(traj.values()(0, l) == 2.5);
    }
}

TEST_CASE("one explicit step of the drift-only problem") {
    // a = -1, b = 0.5, q = 0.5, theta = 0, x0 = 1, h = 1/4:
    // y(t_1) = 1 + 0.25 * (-1 + 0.5) = 0.875.
    const SpdeProblem p = make_drift_only(-1.0, 0.5, 0.5, 1.0);
    const auto mesh = make_mesh(1.0, 4, 0.5);
    BrownianPath path(1, 1, 0);
    path.presample(mesh->points);
    const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.0, 1e-12, 50});
    CHECK(traj.value_at(0.25)(0) == 0.875);
}

TEST_CASE("solve_implicit") {
    SUBCASE("a constant map returns the predictor in zero iterations") {
        const auto constant = [](const Eigen::VectorXd&, Eigen::VectorXd& out) {
            out = Eigen::VectorXd::Constant(1, 0.875);
        };
        const ImplicitSolution sol = solve_implicit(
            constant, Eigen::VectorXd::Constant(1, 0.875), SchemeConfig{0.0, 1e-12, 50});
        CHECK(sol.value(0) == 0.875);
        CHECK(sol.iterations == 0);
    }
    SUBCASE("scalar linear implicit equation reaches the closed form") {
        // y = 0.875 + 0.25 (-y + 0.5 * 0.875)  =>  y = 0.984375 / 1.25 = 0.7875.
        const auto stage = [](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
            out(0) = 0.875 + 0.25 * (-z(0) + 0.5 * 0.875);
        };
        const ImplicitSolution sol = solve_implicit(
            stage, Eigen::VectorXd::Constant(1, 0.875), SchemeConfig{1.0, 1e-12, 50});
        CHECK(sol.value(0) == doctest::Approx(0.7875).epsilon(1e-12));
    }
    SUBCASE("an expanding map diverges") {
        const auto expanding = [](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
            out = 2.0 * z + Eigen::VectorXd::Ones(z.size());
        };
        try {
            solve_implicit(expanding, Eigen::VectorXd::Ones(1), SchemeConfig{1.0, 1e-12, 50});
            FAIL("expected IMPLICIT_DIVERGED");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ImplicitDiverged);
        }
    }
}

TEST_CASE("step guard rejects theta * h * sqrt(K) >= 1/2") {
    // Declared K = 8 with theta = 1 and h = 0.45 fails the margin before any work.
    const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
    const auto mesh = make_mesh(0.9, 2, 0.5);
    BrownianPath path(1, 1, 0);
    path.presample(mesh->points);
    try {
        integrate(p, mesh, path, SchemeConfig{1.0, 1e-12, 50});
        FAIL("expected STEP_TOO_LARGE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepTooLarge);
    }
}

TEST_CASE("lying about K surfaces as implicit divergence, not a guard trip") {
    SpdeProblem p = make_drift_only(10.0, 0.0, 0.5, 1.0);
    p.constants.global_lipschitz = 1e-4;  // declared far below the true Lipschitz constant
    const auto mesh = make_mesh(0.9, 2, 0.5);
    BrownianPath path(1, 1, 0);
    path.presample(mesh->points);
    try {
        integrate(p, mesh, path, SchemeConfig{1.0, 1e-12, 50});
        FAIL("expected IMPLICIT_DIVERGED");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImplicitDiverged);
    }
}

TEST_CASE("nonfinite states are reported as errors, not NaNs") {
    SpdeProblem p = make_drift_only(0.0, 0.0, 0.5, 1e200);
    p.drift = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd&,
                 Eigen::VectorXd& out) { out(0) = x(0) * x(0); };
    const auto mesh = make_mesh(0.9, 2, 0.5);
    BrownianPath path(1, 1, 0);
    path.presample(mesh->points);
    try {
        integrate(p, mesh, path, SchemeConfig{0.0, 1e-12, 50});
        FAIL("expected NONFINITE_STATE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonfiniteState);
    }
}

TEST_CASE("without delay the scheme is the classical deterministic theta method") {
    const double a = -1.3;
    for (const double theta : {0.0, 0.5, 1.0}) {
        CAPTURE(theta);
        const SpdeProblem p = make_drift_only(a, 0.0, 0.5, 1.0);
        const auto mesh = make_mesh(1.0, 16, 0.5);
        BrownianPath path(1, 9, 0);
        path.presample(mesh->points);
        const Trajectory traj = integrate(p, mesh, path, SchemeConfig{theta, 1e-14, 200});

        const double h = mesh->base.step;
        double y = 1.0;
        for (int n = 1; n <= 16; ++n) {
            y = y * (1.0 + h * (1.0 - theta) * a) / (1.0 - h * theta * a);
            CHECK(traj.value_at(mesh->base.point(n))(0) == doctest::Approx(y).epsilon(1e-10));
        }
    }
}

TEST_CASE("continuous extension at fraction 1 reproduces the grid step") {
    const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
    for (const double theta : {0.0, 0.5, 1.0}) {
        CAPTURE(theta);
        const auto mesh = make_mesh(1.0, 16, 0.5);
        BrownianPath path(1, 33, 2);
        path.presample(mesh->points);
        const SchemeConfig cfg{theta, 1e-12, 50};
        const Trajectory traj = integrate(p, mesh, path, cfg);

        const double h = mesh->base.step;
        Eigen::VectorXd f_left(1), f_right(1);
        Eigen::MatrixXd g_left(1, 1);
        for (int n = 0; n + 1 <= 16; ++n) {
            const double t_left = mesh->base.point(n);
            const double t_right = mesh->base.point(n + 1);
            const Eigen::VectorXd y_left = traj.value_at(t_left);
            const Eigen::VectorXd y_right = traj.value_at(t_right);
            const Eigen::VectorXd yq_left = traj.value_at(0.5 * t_left);
            const Eigen::VectorXd yq_right = traj.value_at(0.5 * t_right);
            p.drift(t_left, y_left, yq_left, f_left);
            p.drift(t_right, y_right, yq_right, f_right);
            p.diffusion(t_left, y_left, yq_left, g_left);
            const Eigen::VectorXd extension =
                y_left + h * ((1.0 - theta) * f_left + theta * f_right) +
                g_left * path.increment(t_left, t_right);
            CHECK((extension - y_right).norm() <= 2.0 * cfg.implicit_tolerance);
        }
    }
}

TEST_CASE("the joint solve window matches q/(1-q)") {
    SUBCASE("q = 0.75 couples the first three steps") {
        const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.75);
        const auto mesh = make_mesh(1.0, 16, 0.75);
        BrownianPath path(1, 4, 0);
        path.presample(mesh->points);
        const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
        CHECK(traj.stats.coupled_steps == std::vector<int>{0, 1, 2});
    }
    SUBCASE("q = 0.5 couples only the first step") {
        const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
        const auto mesh = make_mesh(1.0, 16, 0.5);
        BrownianPath path(1, 4, 0);
        path.presample(mesh->points);
        const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
        CHECK(traj.stats.coupled_steps == std::vector<int>{0});
    }
}

TEST_CASE("causality: stepping never queries beyond the current interval") {
    const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
    const auto mesh = make_mesh(1.0, 16, 0.5);
    BrownianPath path(1, 21, 0);
    path.presample(mesh->points);

    const double h = mesh->base.step;
    double frontier = 0.0;
    bool violated = false;
    path.set_query_observer([&](double t) {
        if (t > frontier + 1e-12) {
            // The frontier may only advance by exactly one grid step at a time.
            if (std::abs(t - (frontier + h)) > 1e-9) violated = true;
            frontier = t;
        }
    });
    integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
    CHECK_FALSE(violated);
    CHECK(frontier == doctest::Approx(1.0));
}

TEST_CASE("integrate validates its inputs") {
    const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
    BrownianPath path(1, 1, 0);
    CHECK_THROWS_AS(integrate(p, make_mesh(1.0, 8, 0.7), path, SchemeConfig{}), Error);
    CHECK_THROWS_AS(integrate(p, make_mesh(1.0, 8, 0.5), path, SchemeConfig{1.5, 1e-12, 50}),
                    Error);
    BrownianPath wide(2, 1, 0);
    CHECK_THROWS_AS(integrate(p, make_mesh(1.0, 8, 0.5), wide, SchemeConfig{}), Error);
}

TEST_CASE("trajectory lookups outside the mesh raise REFERENCE_GAP") {
    const SpdeProblem p = make_linear(-2.0, 0.5, 0.5, 0.5, 0.5);
    const auto mesh = make_mesh(1.0, 8, 0.5);
    BrownianPath path(1, 1, 0);
    path.presample(mesh->points);
    const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
    try {
        traj.value_at(0.33);
        FAIL("expected REFERENCE_GAP");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ReferenceGap);
    }
}

TEST_CASE("local truncation samples") {
    SUBCASE("vanishing coefficients give a zero defect") {
        const SpdeProblem p = make_linear(0.0, 0.0, 0.0, 0.0, 0.5, 1.0);
        const auto constant_ref = [](double) { return Eigen::VectorXd::Constant(1, 1.0); };
        BrownianPath path(1, 2, 0);
        const Eigen::VectorXd delta =
            local_truncation_sample(p, constant_ref, 0.25, 1.0, 0.125, 0.0, path);
        CHECK(delta.norm() == 0.0);
    }
    SUBCASE("drift-only defect shrinks like h^2 against the series oracle") {
        const SpdeProblem p = make_drift_only(-1.0, 0.5, 0.5, 1.0);
        const PantographSeries series(-1.0, 0.5, 0.5, 1.0);
        const auto reference = [&](double t) {
            return Eigen::VectorXd::Constant(1, series.evaluate(t, 1e-15));
        };
        BrownianPath path(1, 2, 0);
        const double t_n = 0.5;
        const double coarse = local_truncation_sample(p, reference, t_n, 1.0, 0.1, 0.0, path)
                                  .norm();
        const double fine = local_truncation_sample(p, reference, t_n, 1.0, 0.05, 0.0, path)
                                .norm();
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
    }
    SUBCASE("the defect vanishes as the fraction goes to zero") {
        const SpdeProblem p = make_drift_only(-1.0, 0.5, 0.5, 1.0);
        const PantographSeries series(-1.0, 0.5, 0.5, 1.0);
        const auto reference = [&](double t) {
            return Eigen::VectorXd::Constant(1, series.evaluate(t, 1e-15));
        };
        BrownianPath path(1, 2, 0);
        double previous = 1e9;
        for (const double fraction : {1.0, 0.5, 0.1, 0.01}) {
            const double defect =
                local_truncation_sample(p, reference, 0.5, fraction, 0.1, 0.0, path).norm();
            CHECK(defect < previous);
            previous = defect;
        }
        CHECK(previous < 1e-5);
    }
}
