#include "pansde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pansde/rng.hpp"

namespace pansde {

namespace {

void check_ratio(double ratio) {
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "problem: delay ratio must lie in (0, 1)");
}

}  // namespace

SpdeProblem make_linear(double a, double b, double c, double d, double ratio, double x0) {
    check_ratio(ratio);
    SpdeProblem p;
    p.name = "linear";
    p.state_dim = 1;
    p.noise_dim = 1;
    p.delay_ratio = ratio;
    p.initial_value = Eigen::VectorXd::Constant(1, x0);
    p.drift = [a, b](double, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     Eigen::VectorXd& out) { out(0) = a * x(0) + b * y(0); };
    p.diffusion = [c, d](double, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         Eigen::MatrixXd& out) { out(0, 0) = c * x(0) + d * y(0); };
    p.constants = StructuralConstants{
        a, std::abs(b), std::abs(c), std::abs(d),
        2.0 * std::max({a * a, b * b, c * c, d * d})};
    return p;
}

SpdeProblem make_drift_only(double a, double b, double ratio, double x0) {
    SpdeProblem p = make_linear(a, b, 0.0, 0.0, ratio, x0);
    p.name = "drift_only";
    p.diffusion = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                     Eigen::MatrixXd& out) { out(0, 0) = 0.0; };
    return p;
}

SpdeProblem make_ou(double a, double sigma, double x0, double ratio) {
    check_ratio(ratio);
    SpdeProblem p;
    p.name = "ou";
    p.state_dim = 1;
    p.noise_dim = 1;
    p.delay_ratio = ratio;
    p.initial_value = Eigen::VectorXd::Constant(1, x0);
    p.drift = [a](double, const Eigen::VectorXd& x, const Eigen::VectorXd&,
                  Eigen::VectorXd& out) { out(0) = a * x(0); };
    p.diffusion = [sigma](double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                          Eigen::MatrixXd& out) { out(0, 0) = sigma; };
    // The additive noise term is 0-Lipschitz in both arguments; K still has
    // to cover the growth bound |g|^2 <= K(1 + ...).
    p.constants = StructuralConstants{a, 0.0, 0.0, 0.0,
                                      std::max(2.0 * a * a, sigma * sigma)};
    return p;
}

bool verify_zero_fixed_point(const SpdeProblem& problem, std::span<const double> t_samples) {
    require(!t_samples.empty(), ErrorCode::InvalidArgument,
            "verify_zero_fixed_point: sample list must be non-empty");
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(problem.state_dim);
    Eigen::VectorXd fx(problem.state_dim);
    Eigen::MatrixXd gx(problem.state_dim, problem.noise_dim);
    for (const double t : t_samples) {
        problem.drift(t, zero, zero, fx);
        problem.diffusion(t, zero, zero, gx);
        if (fx.norm() > 1e-12 || gx.norm() > 1e-12) return false;
    }
    return true;
}

double ConstantsReport::worst() const {
    return std::max({drift_one_sided, drift_delay_lip, diff_state_lip, diff_delay_lip,
                     global_lipschitz, linear_growth});
}

namespace {

// Ratio r with r <= 1 iff lhs <= rhs, for either sign of rhs.
double violation_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    if (rhs == 0.0) return lhs <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (lhs >= 0.0) return std::numeric_limits<double>::infinity();
    return rhs / lhs;
}

}  // namespace

ConstantsReport verify_constants(const SpdeProblem& problem, const SamplingBox& box, int trials,
                                 std::uint64_t seed) {
    require(trials >= 1, ErrorCode::InvalidArgument, "verify_constants: trials must be >= 1");
    require(box.t_max >= box.t_min && box.coord_max > box.coord_min, ErrorCode::InvalidArgument,
            "verify_constants: sampling box has zero volume");

    const int d = problem.state_dim;
    const int m = problem.noise_dim;
    const StructuralConstants& k = problem.constants;
    RandomStream rng(seed, 0x636f6e7374u);  // dedicated stream tag

    Eigen::VectorXd x1(d), x2(d), y1(d), y2(d);
    Eigen::VectorXd f11(d), f21(d), f12(d), f22(d);
    Eigen::MatrixXd g11(d, m), g21(d, m), g12(d, m), g22(d, m);
    ConstantsReport report;

    const auto fill = [&](Eigen::VectorXd& v) {
        for (int i = 0; i < d; ++i) v(i) = rng.uniform(box.coord_min, box.coord_max);
    };

    for (int trial = 0; trial < trials; ++trial) {
        const double t = rng.uniform(box.t_min, box.t_max);
        fill(x1);
        fill(x2);
        fill(y1);
        fill(y2);

        problem.drift(t, x1, y1, f11);
        problem.drift(t, x2, y1, f21);
        problem.drift(t, x1, y2, f12);
        problem.drift(t, x2, y2, f22);
        problem.diffusion(t, x1, y1, g11);
        problem.diffusion(t, x2, y1, g21);
        problem.diffusion(t, x1, y2, g12);
        problem.diffusion(t, x2, y2, g22);

        const double dx2 = (x1 - x2).squaredNorm();
        const double dy2 = (y1 - y2).squaredNorm();

        report.drift_one_sided = std::max(
            report.drift_one_sided,
            violation_ratio((x1 - x2).dot(f11 - f21), k.drift_one_sided * dx2));
        report.drift_delay_lip = std::max(
            report.drift_delay_lip,
            violation_ratio((f11 - f12).norm(), k.drift_delay_lip * std::sqrt(dy2)));
        report.diff_state_lip = std::max(
            report.diff_state_lip,
            violation_ratio((g11 - g21).norm(), k.diff_state_lip * std::sqrt(dx2)));
        report.diff_delay_lip = std::max(
            report.diff_delay_lip,
            violation_ratio((g11 - g12).norm(), k.diff_delay_lip * std::sqrt(dy2)));

        const double joint = k.global_lipschitz * (dx2 + dy2);
        report.global_lipschitz = std::max(
            report.global_lipschitz,
            violation_ratio(std::max((f11 - f22).squaredNorm(), (g11 - g22).squaredNorm()),
                            joint));
        const double growth = k.global_lipschitz * (1.0 + x1.squaredNorm() + y1.squaredNorm());
        report.linear_growth = std::max(
            report.linear_growth,
            violation_ratio(std::max(f11.squaredNorm(), g11.squaredNorm()), growth));
    }
    return report;
}

}  // namespace pansde
