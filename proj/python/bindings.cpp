#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pansde/analysis.hpp"
#include "pansde/brownian.hpp"
#include "pansde/mesh.hpp"
#include "pansde/model.hpp"
#include "pansde/oracle.hpp"
#include "pansde/scheme.hpp"
#include "pansde/version.hpp"

namespace py = pybind11;
using namespace pansde;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semi-implicit theta scheme and stability analysis for stochastic "
              "pantograph differential equations";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error");

    // --- mesh ---------------------------------------------------------------
    py::class_<UniformMesh>(m, "UniformMesh")
        .def_readonly("horizon", &UniformMesh::horizon)
        .def_readonly("step_count", &UniformMesh::step_count)
        .def_readonly("step", &UniformMesh::step)
        .def_readonly("points", &UniformMesh::points);

    py::class_<IntervalLocator>(m, "IntervalLocator")
        .def_readonly("interval", &IntervalLocator::interval)
        .def_readonly("fraction", &IntervalLocator::fraction);

    py::enum_<PointKind>(m, "PointKind")
        .value("Grid", PointKind::Grid)
        .value("Delayed", PointKind::Delayed)
        .value("Both", PointKind::Both);

    py::class_<RefinedMesh, std::shared_ptr<RefinedMesh>>(m, "RefinedMesh")
        .def_readonly("ratio", &RefinedMesh::ratio)
        .def_readonly("points", &RefinedMesh::points)
        .def_readonly("kinds", &RefinedMesh::kinds)
        .def_readonly("grid_index", &RefinedMesh::grid_index)
        .def_readonly("delayed_index", &RefinedMesh::delayed_index)
        .def_property_readonly("base", [](const RefinedMesh& s) { return s.base; })
        .def("index_of", &RefinedMesh::index_of, py::arg("s"))
        .def("locate", &RefinedMesh::locate, py::arg("s"));

    m.def("build_uniform", &build_uniform, py::arg("horizon"), py::arg("step_count"));
    m.def("refine", &refine, py::arg("mesh"), py::arg("ratio"));
    m.def("coupling_step", &coupling_step, py::arg("n"), py::arg("ratio"));

    // --- brownian -----------------------------------------------------------
    py::class_<BrownianPath>(m, "BrownianPath")
        .def(py::init<int, std::uint64_t, std::uint64_t, bool, double>(),
             py::arg("dimension"), py::arg("seed"), py::arg("path_index") = 0,
             py::arg("antithetic") = false, py::arg("snap_tol") = 1e-12)
        .def_property_readonly("dimension", &BrownianPath::dimension)
        .def_property_readonly("sample_count", &BrownianPath::sample_count)
        .def("query", &BrownianPath::query, py::arg("t"))
        .def("increment", &BrownianPath::increment, py::arg("t1"), py::arg("t2"))
        .def("presample", [](BrownianPath& path, const std::vector<double>& times) {
            path.presample(times);
        });

    // --- model --------------------------------------------------------------
    py::class_<StructuralConstants>(m, "StructuralConstants")
        .def_readwrite("drift_one_sided", &StructuralConstants::drift_one_sided)
        .def_readwrite("drift_delay_lip", &StructuralConstants::drift_delay_lip)
        .def_readwrite("diff_state_lip", &StructuralConstants::diff_state_lip)
        .def_readwrite("diff_delay_lip", &StructuralConstants::diff_delay_lip)
        .def_readwrite("global_lipschitz", &StructuralConstants::global_lipschitz);

    py::class_<SpdeProblem>(m, "SpdeProblem")
        .def_readonly("name", &SpdeProblem::name)
        .def_readonly("state_dim", &SpdeProblem::state_dim)
        .def_readonly("noise_dim", &SpdeProblem::noise_dim)
        .def_readonly("delay_ratio", &SpdeProblem::delay_ratio)
        .def_readonly("initial_value", &SpdeProblem::initial_value)
        .def_readonly("constants", &SpdeProblem::constants);

    m.def("make_linear", &make_linear, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("d"), py::arg("ratio"), py::arg("x0") = 1.0);
    m.def("make_drift_only", &make_drift_only, py::arg("a"), py::arg("b"), py::arg("ratio"),
          py::arg("x0") = 1.0);
    m.def("make_ou", &make_ou, py::arg("a"), py::arg("sigma"), py::arg("x0") = 1.0,
          py::arg("ratio") = 0.5);

    m.def("verify_zero_fixed_point",
          [](const SpdeProblem& p, const std::vector<double>& t_samples) {
              return verify_zero_fixed_point(p, t_samples);
          },
          py::arg("problem"), py::arg("t_samples"));

    py::class_<SamplingBox>(m, "SamplingBox")
        .def(py::init<>())
        .def_readwrite("t_min", &SamplingBox::t_min)
        .def_readwrite("t_max", &SamplingBox::t_max)
        .def_readwrite("coord_min", &SamplingBox::coord_min)
        .def_readwrite("coord_max", &SamplingBox::coord_max);

    py::class_<ConstantsReport>(m, "ConstantsReport")
        .def_readonly("drift_one_sided", &ConstantsReport::drift_one_sided)
        .def_readonly("drift_delay_lip", &ConstantsReport::drift_delay_lip)
        .def_readonly("diff_state_lip", &ConstantsReport::diff_state_lip)
        .def_readonly("diff_delay_lip", &ConstantsReport::diff_delay_lip)
        .def_readonly("global_lipschitz", &ConstantsReport::global_lipschitz)
        .def_readonly("linear_growth", &ConstantsReport::linear_growth)
        .def("worst", &ConstantsReport::worst)
        .def("all_within", &ConstantsReport::all_within, py::arg("slack") = 0.0);

    m.def("verify_constants", &verify_constants, py::arg("problem"), py::arg("box"),
          py::arg("trials"), py::arg("seed"));

    // --- scheme -------------------------------------------------------------
    py::class_<SchemeConfig>(m, "SchemeConfig")
        .def(py::init<>())
        .def(py::init([](double theta, double tol, int max_iterations) {
                 return SchemeConfig{theta, tol, max_iterations};
             }),
             py::arg("theta"), py::arg("implicit_tolerance") = 1e-12,
             py::arg("max_iterations") = 50)
        .def_readwrite("theta", &SchemeConfig::theta)
        .def_readwrite("implicit_tolerance", &SchemeConfig::implicit_tolerance)
        .def_readwrite("max_iterations", &SchemeConfig::max_iterations);

    py::class_<IntegrationStats>(m, "IntegrationStats")
        .def_readonly("fixed_point_iterations", &IntegrationStats::fixed_point_iterations)
        .def_readonly("coupled_steps", &IntegrationStats::coupled_steps);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times",
                               [](const Trajectory& t) { return t.mesh().points; })
        .def_property_readonly("values",
                               [](const Trajectory& t) { return t.values(); })
        .def_readonly("theta", &Trajectory::theta)
        .def_readonly("seed", &Trajectory::seed)
        .def_readonly("path_index", &Trajectory::path_index)
        .def_readonly("stats", &Trajectory::stats)
        .def("value_at", &Trajectory::value_at, py::arg("t"));

    m.def("integrate", &integrate, py::arg("problem"), py::arg("mesh"), py::arg("path"),
          py::arg("config"));

    m.def("local_truncation_sample",
          [](const SpdeProblem& p, const Trajectory& reference, double t_n, double fraction,
             double coarse_step, double theta, BrownianPath& path) {
              return local_truncation_sample(p, reference.as_reference(), t_n, fraction,
                                             coarse_step, theta, path);
          },
          py::arg("problem"), py::arg("reference"), py::arg("t_n"), py::arg("fraction"),
          py::arg("coarse_step"), py::arg("theta"), py::arg("path"));

    // --- oracle -------------------------------------------------------------
    py::class_<PantographSeries>(m, "PantographSeries")
        .def(py::init<double, double, double, double>(), py::arg("drift_coef"),
             py::arg("delay_coef"), py::arg("ratio"), py::arg("x0"))
        .def("evaluate", &PantographSeries::evaluate, py::arg("t"), py::arg("tol") = 1e-14)
        .def_property_readonly("coefficients", [](const PantographSeries& s) {
            return std::vector<double>(s.coefficients().begin(), s.coefficients().end());
        });

    m.def("series_solve", &series_solve, py::arg("drift_coef"), py::arg("delay_coef"),
          py::arg("ratio"), py::arg("x0"), py::arg("t"), py::arg("tol"));
    m.def("decay_exponent_det", &decay_exponent_det, py::arg("drift_coef"),
          py::arg("delay_coef"), py::arg("ratio"));

    py::class_<EnvelopeVerdict>(m, "EnvelopeVerdict")
        .def_readonly("holds", &EnvelopeVerdict::holds)
        .def_readonly("margin", &EnvelopeVerdict::margin)
        .def_readonly("constant", &EnvelopeVerdict::constant)
        .def_readonly("alpha", &EnvelopeVerdict::alpha);

    m.def("envelope_check",
          [](const std::vector<double>& times, const std::vector<double>& values,
             double drift_coef, double delay_coef, double ratio) {
              return envelope_check(times, values, drift_coef, delay_coef, ratio);
          },
          py::arg("times"), py::arg("values"), py::arg("drift_coef"), py::arg("delay_coef"),
          py::arg("ratio"));
    m.def("ou_second_moment", &ou_second_moment, py::arg("a"), py::arg("sigma"),
          py::arg("x0"), py::arg("horizon"));

    // --- analysis -----------------------------------------------------------
    py::class_<OrderFit>(m, "OrderFit")
        .def_readonly("step_sizes", &OrderFit::step_sizes)
        .def_readonly("errors", &OrderFit::errors)
        .def_readonly("slope", &OrderFit::slope)
        .def_readonly("intercept", &OrderFit::intercept)
        .def_readonly("residual_norm", &OrderFit::residual_norm)
        .def_readonly("slope_stderr", &OrderFit::slope_stderr)
        .def_readonly("slope_ci95", &OrderFit::slope_ci95);

    m.def("fit_order",
          [](const std::vector<double>& h, const std::vector<double>& e) {
              return fit_order(h, e);
          },
          py::arg("step_sizes"), py::arg("errors"));
    m.def("alpha_ms", &alpha_ms, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
          py::arg("ratio"));
    m.def("check_ms_stable", &check_ms_stable, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("d"));

    py::class_<AsVerdict>(m, "AsVerdict")
        .def_readonly("stable", &AsVerdict::stable)
        .def_readonly("rate", &AsVerdict::rate);
    m.def("check_as_stable", &check_as_stable, py::arg("a"), py::arg("b"), py::arg("c"),
          py::arg("d"), py::arg("ratio"));

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("slope", &DecayFit::slope)
        .def_readonly("intercept", &DecayFit::intercept)
        .def_readonly("noise_floor", &DecayFit::noise_floor)
        .def_readonly("samples_used", &DecayFit::samples_used);

    m.def("fit_ms_decay",
          [](const std::vector<double>& t, const std::vector<double>& v) {
              return fit_ms_decay(t, v);
          },
          py::arg("times"), py::arg("values"));
    m.def("fit_pathwise_decay",
          [](const std::vector<double>& t, const std::vector<double>& v) {
              return fit_pathwise_decay(t, v);
          },
          py::arg("times"), py::arg("values"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("ms_stable", &StabilityReport::ms_stable)
        .def_readonly("as_stable", &StabilityReport::as_stable)
        .def_readonly("has_alpha", &StabilityReport::has_alpha)
        .def_readonly("alpha", &StabilityReport::alpha)
        .def_readonly("as_rate", &StabilityReport::as_rate)
        .def_readonly("fitted_ms_slope", &StabilityReport::fitted_ms_slope)
        .def_readonly("path_count", &StabilityReport::path_count);
    m.def("make_stability_report", &make_stability_report, py::arg("a"), py::arg("b"),
          py::arg("c"), py::arg("d"), py::arg("ratio"));

    py::class_<StrongErrorParams>(m, "StrongErrorParams")
        .def(py::init<>())
        .def_readwrite("horizon", &StrongErrorParams::horizon)
        .def_readwrite("step_counts", &StrongErrorParams::step_counts)
        .def_readwrite("fine_factor", &StrongErrorParams::fine_factor)
        .def_readwrite("paths", &StrongErrorParams::paths)
        .def_readwrite("seed", &StrongErrorParams::seed)
        .def_readwrite("workers", &StrongErrorParams::workers)
        .def_readwrite("scheme", &StrongErrorParams::scheme);

    py::class_<StrongErrorResult>(m, "StrongErrorResult")
        .def_readonly("fit", &StrongErrorResult::fit)
        .def_readonly("stderrs", &StrongErrorResult::stderrs)
        .def_readonly("comparison_times", &StrongErrorResult::comparison_times);
    m.def("strong_error", &strong_error, py::arg("problem"), py::arg("params"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ConsistencyParams>(m, "ConsistencyParams")
        .def(py::init<>())
        .def_readwrite("horizon", &ConsistencyParams::horizon)
        .def_readwrite("step_counts", &ConsistencyParams::step_counts)
        .def_readwrite("fine_factor", &ConsistencyParams::fine_factor)
        .def_readwrite("anchor_time", &ConsistencyParams::anchor_time)
        .def_readwrite("fraction", &ConsistencyParams::fraction)
        .def_readwrite("paths", &ConsistencyParams::paths)
        .def_readwrite("antithetic", &ConsistencyParams::antithetic)
        .def_readwrite("scan_all_steps", &ConsistencyParams::scan_all_steps)
        .def_readwrite("seed", &ConsistencyParams::seed)
        .def_readwrite("workers", &ConsistencyParams::workers)
        .def_readwrite("scheme", &ConsistencyParams::scheme);

    py::class_<ConsistencyResult>(m, "ConsistencyResult")
        .def_readonly("mean_fit", &ConsistencyResult::mean_fit)
        .def_readonly("rms_fit", &ConsistencyResult::rms_fit)
        .def_readonly("mean_defect", &ConsistencyResult::mean_defect)
        .def_readonly("mean_stderr", &ConsistencyResult::mean_stderr)
        .def_readonly("rms_defect", &ConsistencyResult::rms_defect)
        .def_readonly("rms_stderr", &ConsistencyResult::rms_stderr)
        .def_readonly("noise_floor", &ConsistencyResult::noise_floor)
        .def_readonly("surviving", &ConsistencyResult::surviving);
    m.def("consistency_orders", &consistency_orders, py::arg("problem"), py::arg("params"),
          py::call_guard<py::gil_scoped_release>());
}
