#include "pansde/scheme.hpp"

#include <cassert>
#include <cmath>

namespace pansde {

Trajectory::Trajectory(std::shared_ptr<const RefinedMesh> mesh, int state_dim)
    : mesh_(std::move(mesh)), values_(state_dim, mesh_->size()) {
    values_.setZero();
}

Eigen::VectorXd Trajectory::value_at(double t) const {
    const int index = mesh_->index_of(t);
    if (index < 0) {
        fail(ErrorCode::ReferenceGap, "Trajectory: no mesh point at the requested time");
    }
    return values_.col(index);
}

std::function<Eigen::VectorXd(double)> Trajectory::as_reference() const {
    return [this](double t) { return value_at(t); };
}

ImplicitSolution solve_implicit(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& map,
    const Eigen::VectorXd& guess, const SchemeConfig& config) {
    require(config.implicit_tolerance > 0.0, ErrorCode::InvalidArgument,
            "solve_implicit: tolerance must be positive");
    require(config.max_iterations >= 1, ErrorCode::InvalidArgument,
            "solve_implicit: max_iterations must be >= 1");

    Eigen::VectorXd z = guess;
    Eigen::VectorXd next(z.size());
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        map(z, next);
        const double residual = (next - z).norm();
        if (residual <= config.implicit_tolerance) {
            return ImplicitSolution{next, iter, residual};
        }
        z.swap(next);
    }
    fail(ErrorCode::ImplicitDiverged,
         "solve_implicit: fixed-point residual above tolerance after max iterations");
}

namespace {

void check_finite(const Eigen::VectorXd& v, int step) {
    if (!v.allFinite()) {
        fail(ErrorCode::NonfiniteState,
             "integrate: state became non-finite at step " + std::to_string(step));
    }
}

}  // namespace

Trajectory integrate(const SpdeProblem& problem, std::shared_ptr<const RefinedMesh> mesh,
                     BrownianPath& path, const SchemeConfig& config) {
    require(mesh != nullptr && mesh->size() >= 2, ErrorCode::InvalidArgument,
            "integrate: mesh is empty");
    require(std::abs(mesh->ratio - problem.delay_ratio) <= 1e-15, ErrorCode::InvalidArgument,
            "integrate: mesh was refined with a different delay ratio");
    require(config.theta >= 0.0 && config.theta <= 1.0, ErrorCode::InvalidArgument,
            "integrate: theta must lie in [0, 1]");
    require(path.dimension() == problem.noise_dim, ErrorCode::InvalidArgument,
            "integrate: path dimension does not match the problem's noise dimension");

    const double h = mesh->base.step;
    const double theta = config.theta;
    if (theta > 0.0) {
        // A-priori contraction margin for the Picard solve, in the spirit of
        // the step restriction h0 = (sqrt(13)-1)/12 * K^{-1/2}.
        const double contraction = theta * h * std::sqrt(problem.constants.global_lipschitz);
        if (!(contraction < 0.5)) {
            fail(ErrorCode::StepTooLarge,
                 "integrate: theta * h * sqrt(K) = " + std::to_string(contraction) +
                     " fails the contraction requirement (< 0.5)");
        }
    }

    const int d = problem.state_dim;
    Trajectory traj(mesh, d);
    traj.theta = theta;
    traj.seed = path.seed();
    traj.path_index = path.path_index();

    std::vector<char> written(static_cast<std::size_t>(mesh->size()), 0);
    traj.values().col(0) = problem.initial_value;
    written[0] = 1;

    Eigen::VectorXd f_left(d), f_right(d), scratch(d);
    Eigen::MatrixXd g_left(d, problem.noise_dim);
    Eigen::VectorXd base_grid(d), base_delay(d), predictor(d);

    const auto read = [&](int index) {
        assert(written[static_cast<std::size_t>(index)] && "delayed value read before write");
        return traj.values().col(index);
    };

    for (int n = 0; n < mesh->base.step_count; ++n) {
        const double t_left = mesh->base.point(n);
        const double t_right = mesh->base.point(n + 1);
        const int l_left = mesh->grid_index[static_cast<std::size_t>(n)];
        const int l_right = mesh->grid_index[static_cast<std::size_t>(n) + 1];
        const int l_delay_left = mesh->delayed_index[static_cast<std::size_t>(n)];
        const int l_delay_right = mesh->delayed_index[static_cast<std::size_t>(n) + 1];

        const auto y_left = read(l_left);
        problem.drift(t_left, y_left, read(l_delay_left), f_left);
        problem.diffusion(t_left, y_left, read(l_delay_left), g_left);
        const Eigen::VectorXd noise_step = path.increment(t_left, t_right);

        base_grid = y_left + h * (1.0 - theta) * f_left + g_left * noise_step;
        const bool coupled = l_delay_right > l_left;

        if (!coupled) {
            // Delayed argument of the implicit stage is already known.
            const Eigen::VectorXd y_delay_right = read(l_delay_right);
            if (theta == 0.0) {
                traj.values().col(l_right) = base_grid;
            } else {
                predictor = y_left + h * f_left + g_left * noise_step;
                const auto stage = [&](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
                    problem.drift(t_right, z, y_delay_right, scratch);
                    out = base_grid + h * theta * scratch;
                };
                ImplicitSolution sol = solve_implicit(stage, predictor, config);
                traj.values().col(l_right) = sol.value;
                traj.stats.fixed_point_iterations += sol.iterations;
            }
            written[static_cast<std::size_t>(l_right)] = 1;
            problem.drift(t_right, traj.values().col(l_right), y_delay_right, f_right);
        } else {
            // q * t_{n+1} falls inside (t_n, t_{n+1}): solve the grid value and
            // the delayed value as one fixed point in R^{2d}, with the
            // continuous extension supplying the second component.
            const double s_delay = mesh->point(l_delay_right);
            const double frac =
                mesh->locators[static_cast<std::size_t>(l_delay_right)].fraction;
            const Eigen::VectorXd noise_delay = path.increment(t_left, s_delay);
            base_delay = y_left + frac * h * (1.0 - theta) * f_left + g_left * noise_delay;

            Eigen::VectorXd joint(2 * d);
            joint.head(d) = y_left + h * f_left + g_left * noise_step;
            joint.tail(d) = y_left + frac * h * f_left + g_left * noise_delay;
            if (theta > 0.0) {
                const auto stage = [&](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
                    problem.drift(t_right, z.head(d), z.tail(d), scratch);
                    out.head(d) = base_grid + h * theta * scratch;
                    out.tail(d) = base_delay + frac * h * theta * scratch;
                };
                ImplicitSolution sol = solve_implicit(stage, joint, config);
                joint = sol.value;
                traj.stats.fixed_point_iterations += sol.iterations;
            }
            traj.values().col(l_right) = joint.head(d);
            traj.values().col(l_delay_right) = joint.tail(d);
            written[static_cast<std::size_t>(l_right)] = 1;
            written[static_cast<std::size_t>(l_delay_right)] = 1;
            traj.stats.coupled_steps.push_back(n);
            problem.drift(t_right, traj.values().col(l_right),
                          traj.values().col(l_delay_right), f_right);
        }
        check_finite(traj.values().col(l_right), n);

        // Continuous extension at the interior refined points, with the
        // diffusion frozen at (t_n, y_n, y(q t_n)).
        for (int l = l_left + 1; l < l_right; ++l) {
            if (written[static_cast<std::size_t>(l)]) continue;
            const double frac = mesh->locators[static_cast<std::size_t>(l)].fraction;
            const Eigen::VectorXd noise_part = path.increment(t_left, mesh->point(l));
            traj.values().col(l) = y_left +
                                   frac * h * ((1.0 - theta) * f_left + theta * f_right) +
                                   g_left * noise_part;
            written[static_cast<std::size_t>(l)] = 1;
            check_finite(traj.values().col(l), n);
        }
    }
    return traj;
}

Eigen::VectorXd local_truncation_sample(
    const SpdeProblem& problem, const std::function<Eigen::VectorXd(double)>& reference,
    double t_n, double fraction, double coarse_step, double theta, BrownianPath& path) {
    require(fraction > 0.0 && fraction <= 1.0, ErrorCode::InvalidArgument,
            "local_truncation_sample: fraction must lie in (0, 1]");
    require(coarse_step > 0.0 && t_n >= 0.0, ErrorCode::InvalidArgument,
            "local_truncation_sample: invalid anchor or step");
    require(theta >= 0.0 && theta <= 1.0, ErrorCode::InvalidArgument,
            "local_truncation_sample: theta must lie in [0, 1]");

    const double q = problem.delay_ratio;
    const double t_right = t_n + coarse_step;
    const double t_eval = t_n + fraction * coarse_step;

    const Eigen::VectorXd x_left = reference(t_n);
    const Eigen::VectorXd x_right = reference(t_right);
    const Eigen::VectorXd x_eval = reference(t_eval);
    const Eigen::VectorXd x_delay_left = reference(q * t_n);
    const Eigen::VectorXd x_delay_right = reference(q * t_right);

    const int d = problem.state_dim;
    Eigen::VectorXd f_left(d), f_right(d);
    Eigen::MatrixXd g_left(d, problem.noise_dim);
    problem.drift(t_n, x_left, x_delay_left, f_left);
    problem.drift(t_right, x_right, x_delay_right, f_right);
    problem.diffusion(t_n, x_left, x_delay_left, g_left);

    const Eigen::VectorXd noise_part = path.increment(t_n, t_eval);
    return x_eval - (x_left +
                     fraction * coarse_step * ((1.0 - theta) * f_left + theta * f_right) +
                     g_left * noise_part);
}

}  // namespace pansde
