#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "pansde/brownian.hpp"
#include "pansde/common.hpp"
#include "pansde/mesh.hpp"
#include "pansde/model.hpp"

namespace pansde {

struct SchemeConfig {
    double theta = 0.5;                // drift implicitness weight, in [0, 1]
    double implicit_tolerance = 1e-12; // fixed-point residual, Euclidean norm
    int max_iterations = 50;
};

struct IntegrationStats {
    long fixed_point_iterations = 0;
    std::vector<int> coupled_steps;  // steps solved as a joint 2d system
};

/// Numerical solution on a refined mesh: one state vector per refined point,
/// together with its provenance.
class Trajectory {
public:
    Trajectory(std::shared_ptr<const RefinedMesh> mesh, int state_dim);

    const RefinedMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const RefinedMesh> mesh_ptr() const { return mesh_; }
    int state_dim() const { return static_cast<int>(values_.rows()); }
    int size() const { return static_cast<int>(values_.cols()); }

    Eigen::MatrixXd& values() { return values_; }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd value(int index) const { return values_.col(index); }

    /// Value at a refined point given by time; throws ReferenceGap when t is
    /// not a mesh point (beyond the snap tolerance).
    Eigen::VectorXd value_at(double t) const;

    /// Value lookup closure for use as a reference solution.
    std::function<Eigen::VectorXd(double)> as_reference() const;

    double theta = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    IntegrationStats stats;

private:
    std::shared_ptr<const RefinedMesh> mesh_;
    Eigen::MatrixXd values_;  // state_dim x mesh size
};

struct ImplicitSolution {
    Eigen::VectorXd value;
    int iterations = 0;
    double residual = 0.0;
};

/// Picard iteration for z = map(z) starting from the explicit predictor.
/// Returns once the residual |map(z) - z| drops below the tolerance; throws
/// IMPLICIT_DIVERGED after max_iterations.
ImplicitSolution solve_implicit(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& map,
    const Eigen::VectorXd& guess, const SchemeConfig& config);

/// Runs the semi-implicit theta scheme over the refined mesh and fills every
/// refined point through the continuous extension.
///
/// Preconditions: the mesh was refined with the problem's delay ratio, and
/// the path is presampled on the finest mesh of the experiment (ascending).
/// When the delayed argument of a step lands inside the step's own interval,
/// the grid value and the delayed value are solved as one joint fixed point.
///
/// Errors: STEP_TOO_LARGE when theta > 0 and theta * h * sqrt(K) >= 1/2;
/// IMPLICIT_DIVERGED from the fixed-point solver; NONFINITE_STATE when any
/// value stops being finite.
Trajectory integrate(const SpdeProblem& problem, std::shared_ptr<const RefinedMesh> mesh,
                     BrownianPath& path, const SchemeConfig& config);

/// One sample of the local truncation defect: the reference solution x(.) is
/// inserted into a single scheme step of size coarse_step anchored at grid
/// time t_n and evaluated at t_n + fraction * coarse_step. The reference must
/// cover t_n, t_n + coarse_step, the evaluation point and both delayed
/// arguments; gaps raise REFERENCE_GAP.
Eigen::VectorXd local_truncation_sample(
    const SpdeProblem& problem, const std::function<Eigen::VectorXd(double)>& reference,
    double t_n, double fraction, double coarse_step, double theta, BrownianPath& path);

}  // namespace pansde
