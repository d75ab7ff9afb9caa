#include "pansde/experiments.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <ostream>

#include "pansde/csv.hpp"
#include "pansde/oracle.hpp"
#include "pansde/parallel.hpp"
#include "pansde/rng.hpp"
#include "pansde/version.hpp"

namespace pansde::cli {

namespace {

int effective_workers(const ExperimentConfig& config) {
    return config.workers > 0 ? config.workers : default_workers();
}

SchemeConfig scheme_of(const ExperimentConfig& config) {
    SchemeConfig scheme;
    scheme.theta = config.theta;
    scheme.implicit_tolerance = config.implicit_tolerance;
    scheme.max_iterations = config.max_iterations;
    return scheme;
}

// Config echo without the keys that may be overridden per invocation without
// changing results (workers) or that are echoed explicitly (seed).
void write_metadata(CsvWriter& csv, const ExperimentConfig& config, const char* command) {
    csv.comment(std::string("pansde ") + kVersion);
    csv.comment(std::string("command = ") + command);
    csv.comment("seed = " + std::to_string(config.seed));
    for (const auto& [key, value] : config.echo) {
        if (key == "seed" || key == "workers") continue;
        csv.comment(key + " = " + value);
    }
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

}  // namespace

StabilityReport run_analyze(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir, std::ostream& log) {
    const StabilityReport report =
        make_stability_report(config.a, config.b, config.c, config.d, config.q);

    CsvWriter csv(out_dir / "analyze.csv");
    write_metadata(csv, config, "analyze");
    const std::string columns[] = {"a", "b", "c", "d", "q", "ms_stable", "as_stable",
                                   "alpha", "as_rate"};
    csv.header(columns);
    const std::string cells[] = {
        format_g17(config.a),         format_g17(config.b),
        format_g17(config.c),         format_g17(config.d),
        format_g17(config.q),         bool_str(report.ms_stable),
        bool_str(report.as_stable),
        report.has_alpha ? format_g17(report.alpha) : "nan",
        report.as_stable ? format_g17(report.as_rate) : "nan"};
    csv.row(cells);

    log << "analyze: ms_stable = " << bool_str(report.ms_stable)
        << ", as_stable = " << bool_str(report.as_stable);
    if (report.has_alpha) {
        log << ", alpha = " << format_g17(report.alpha);
        if (report.as_stable) log << ", as_rate = " << format_g17(report.as_rate);
    } else {
        log << ", alpha = NO_REAL_ROOT";
    }
    log << "\n";
    return report;
}

void run_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& log) {
    const SpdeProblem problem = build_problem(config);
    const auto mesh = std::make_shared<RefinedMesh>(
        refine(build_uniform(config.horizon, config.sim_steps), problem.delay_ratio));
    const SchemeConfig scheme = scheme_of(config);
    const int paths = config.sim_paths;
    const int workers = effective_workers(config);
    const double snap = time_snap_tolerance(config.horizon);
    const int n_points = mesh->size();

    if (config.sim_output == "trajectories") {
        std::vector<Eigen::MatrixXd> results(static_cast<std::size_t>(paths));
        parallel_blocks(paths, workers, [&](int, int first, int last) {
            for (int i = first; i < last; ++i) {
                BrownianPath path(problem.noise_dim, config.seed,
                                  static_cast<std::uint64_t>(i), false, snap);
                path.presample(mesh->points);
                results[static_cast<std::size_t>(i)] =
                    integrate(problem, mesh, path, scheme).values();
            }
        });
        // Single writer for all files.
        for (int i = 0; i < paths; ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "trajectory_p%06d.csv", i);
            CsvWriter csv(out_dir / name);
            write_metadata(csv, config, "simulate");
            csv.comment("path_index = " + std::to_string(i));
            std::vector<std::string> columns = {"time"};
            for (int comp = 0; comp < problem.state_dim; ++comp) {
                columns.push_back("y" + std::to_string(comp));
            }
            csv.header(columns);
            std::vector<double> row(static_cast<std::size_t>(problem.state_dim) + 1);
            for (int l = 0; l < n_points; ++l) {
                row[0] = mesh->point(l);
                for (int comp = 0; comp < problem.state_dim; ++comp) {
                    row[static_cast<std::size_t>(comp) + 1] =
                        results[static_cast<std::size_t>(i)](comp, l);
                }
                csv.row(row);
            }
        }
        log << "simulate: wrote " << paths << " trajectory files over " << n_points
            << " mesh points\n";
        return;
    }

    std::vector<Eigen::VectorXd> partials(static_cast<std::size_t>(block_count(paths)),
                                          Eigen::VectorXd::Zero(n_points));
    parallel_blocks(paths, workers, [&](int block, int first, int last) {
        Eigen::VectorXd& acc = partials[static_cast<std::size_t>(block)];
        for (int i = first; i < last; ++i) {
            BrownianPath path(problem.noise_dim, config.seed, static_cast<std::uint64_t>(i),
                              false, snap);
            path.presample(mesh->points);
            const Trajectory traj = integrate(problem, mesh, path, scheme);
            acc += traj.values().colwise().squaredNorm().transpose();
        }
    });
    const Eigen::VectorXd total = reduce_pairwise(
        std::move(partials), [](Eigen::VectorXd& into, const Eigen::VectorXd& from) {
            into += from;
        });

    CsvWriter csv(out_dir / "mean_square.csv");
    write_metadata(csv, config, "simulate");
    const std::string columns[] = {"time", "mean_square"};
    csv.header(columns);
    for (int l = 0; l < n_points; ++l) {
        const double row[] = {mesh->point(l), total(l) / static_cast<double>(paths)};
        csv.row(row);
    }
    log << "simulate: wrote mean_square.csv over " << n_points << " mesh points, " << paths
        << " paths\n";
}

StrongErrorResult run_convergence(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log) {
    const SpdeProblem problem = build_problem(config);
    StrongErrorParams params;
    params.horizon = config.horizon;
    params.step_counts = config.conv_steps;
    params.fine_factor = config.conv_fine_factor;
    params.paths = config.conv_paths;
    params.seed = config.seed;
    params.workers = effective_workers(config);
    params.scheme = scheme_of(config);

    const StrongErrorResult result = strong_error(problem, params);

    CsvWriter csv(out_dir / "convergence.csv");
    write_metadata(csv, config, "convergence");
    csv.comment("fitted_slope = " + format_g17(result.fit.slope));
    csv.comment("slope_ci95 = " + format_g17(result.fit.slope_ci95));
    csv.comment("fit_residual = " + format_g17(result.fit.residual_norm));
    const std::string columns[] = {"h", "rms_error", "stderr"};
    csv.header(columns);
    for (std::size_t j = 0; j < result.fit.step_sizes.size(); ++j) {
        const double row[] = {result.fit.step_sizes[j], result.fit.errors[j],
                              result.stderrs[j]};
        csv.row(row);
    }
    log << "convergence: slope = " << format_g17(result.fit.slope) << " +- "
        << format_g17(result.fit.slope_ci95) << " (95% CI), residual = "
        << format_g17(result.fit.residual_norm) << "\n";
    return result;
}

ConsistencyResult run_consistency(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log) {
    const SpdeProblem problem = build_problem(config);
    ConsistencyParams params;
    params.horizon = config.horizon;
    params.step_counts = config.cons_steps;
    params.fine_factor = config.cons_fine_factor;
    params.anchor_time = config.cons_anchor;
    params.fraction = config.cons_fraction;
    params.paths = config.cons_paths;
    params.antithetic = config.cons_antithetic;
    params.scan_all_steps = config.cons_scan_all;
    params.seed = config.seed;
    params.workers = effective_workers(config);
    params.scheme = scheme_of(config);

    const ConsistencyResult result = consistency_orders(problem, params);

    std::vector<int> steps = config.cons_steps;
    std::sort(steps.begin(), steps.end());

    {
        CsvWriter csv(out_dir / "consistency_mean.csv");
        write_metadata(csv, config, "consistency");
        csv.comment("fitted_slope = " + format_g17(result.mean_fit.slope));
        csv.comment("slope_ci95 = " + format_g17(result.mean_fit.slope_ci95));
        csv.comment(std::string("noise_floor = ") + bool_str(result.noise_floor));
        std::vector<std::string> columns = {"h", "mean_defect", "stderr", "in_fit"};
        if (params.scan_all_steps) columns.push_back("max_over_anchors");
        csv.header(columns);
        for (std::size_t j = 0; j < steps.size(); ++j) {
            std::vector<std::string> cells = {
                format_g17(config.horizon / steps[j]), format_g17(result.mean_defect[j]),
                format_g17(result.mean_stderr[j]),
                bool_str(std::find(result.surviving.begin(), result.surviving.end(),
                                   static_cast<int>(j)) != result.surviving.end())};
            if (params.scan_all_steps) cells.push_back(format_g17(result.scan_mean_defect[j]));
            csv.row(cells);
        }
    }
    {
        CsvWriter csv(out_dir / "consistency_rms.csv");
        write_metadata(csv, config, "consistency");
        csv.comment("fitted_slope = " + format_g17(result.rms_fit.slope));
        csv.comment("slope_ci95 = " + format_g17(result.rms_fit.slope_ci95));
        std::vector<std::string> columns = {"h", "rms_defect", "stderr"};
        if (params.scan_all_steps) columns.push_back("max_over_anchors");
        csv.header(columns);
        for (std::size_t j = 0; j < steps.size(); ++j) {
            std::vector<std::string> cells = {format_g17(config.horizon / steps[j]),
                                              format_g17(result.rms_defect[j]),
                                              format_g17(result.rms_stderr[j])};
            if (params.scan_all_steps) cells.push_back(format_g17(result.scan_rms_defect[j]));
            csv.row(cells);
        }
    }
    log << "consistency: mean slope = " << format_g17(result.mean_fit.slope)
        << (result.noise_floor ? " (NOISE_FLOOR, surviving range only)" : "")
        << ", rms slope = " << format_g17(result.rms_fit.slope) << "\n";
    return result;
}

StabilityReport run_stability_fit(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log) {
    const SpdeProblem problem = build_problem(config);
    const auto mesh = std::make_shared<RefinedMesh>(
        refine(build_uniform(config.horizon, config.fit_steps), problem.delay_ratio));
    const SchemeConfig scheme = scheme_of(config);
    const int paths = config.fit_paths;
    const double snap = time_snap_tolerance(config.horizon);
    const int n_points = mesh->size();

    std::vector<Eigen::VectorXd> partials(static_cast<std::size_t>(block_count(paths)),
                                          Eigen::VectorXd::Zero(n_points));
    parallel_blocks(paths, effective_workers(config), [&](int block, int first, int last) {
        Eigen::VectorXd& acc = partials[static_cast<std::size_t>(block)];
        for (int i = first; i < last; ++i) {
            BrownianPath path(problem.noise_dim, config.seed, static_cast<std::uint64_t>(i),
                              false, snap);
            path.presample(mesh->points);
            const Trajectory traj = integrate(problem, mesh, path, scheme);
            acc += traj.values().colwise().squaredNorm().transpose();
        }
    });
    const Eigen::VectorXd total = reduce_pairwise(
        std::move(partials), [](Eigen::VectorXd& into, const Eigen::VectorXd& from) {
            into += from;
        });

    // Logarithmically spaced tail window [tail_low, T], snapped to mesh points.
    const double tail_low =
        config.fit_tail_low > 0.0 ? config.fit_tail_low : config.horizon / 10.0;
    std::vector<double> tail_times;
    std::vector<double> tail_values;
    int previous_index = -1;
    for (int k = 0; k < config.fit_tail_samples; ++k) {
        const double target = std::exp(
            std::log(tail_low) + (std::log(config.horizon) - std::log(tail_low)) * k /
                                     (config.fit_tail_samples - 1));
        const auto it =
            std::lower_bound(mesh->points.begin(), mesh->points.end(), target);
        int index = static_cast<int>(std::min<std::ptrdiff_t>(
            it - mesh->points.begin(), static_cast<std::ptrdiff_t>(n_points) - 1));
        if (index == previous_index) continue;
        previous_index = index;
        tail_times.push_back(mesh->point(index));
        tail_values.push_back(total(index) / static_cast<double>(paths));
    }
    require(tail_times.size() >= 8, ErrorCode::ConfigError,
            "stability-fit: fewer than 8 distinct tail samples; increase N or the window");

    const DecayFit fit = fit_ms_decay(tail_times, tail_values);

    StabilityReport report;
    if (config.problem == "linear" && config.b > 0.0 && config.c > 0.0 && config.d > 0.0) {
        report = make_stability_report(config.a, config.b, config.c, config.d, config.q);
    } else {
        const StructuralConstants& k = problem.constants;
        try {
            report.alpha = alpha_ms(k.drift_one_sided, k.drift_delay_lip, k.diff_state_lip,
                                    k.diff_delay_lip, problem.delay_ratio);
            report.has_alpha = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRealRoot) throw;
        }
    }
    report.fitted_ms_slope = fit.slope;
    report.fit_window_low = tail_times.front();
    report.fit_window_high = tail_times.back();
    report.path_count = paths;

    CsvWriter csv(out_dir / "stability_fit.csv");
    write_metadata(csv, config, "stability-fit");
    if (report.has_alpha) csv.comment("alpha = " + format_g17(report.alpha));
    csv.comment("fitted_slope = " + format_g17(fit.slope));
    csv.comment(std::string("noise_floor = ") + bool_str(fit.noise_floor));
    const std::string columns[] = {"time", "mean_square"};
    csv.header(columns);
    for (std::size_t k = 0; k < tail_times.size(); ++k) {
        const double row[] = {tail_times[k], tail_values[k]};
        csv.row(row);
    }
    log << "stability-fit: fitted slope = " << format_g17(fit.slope);
    if (report.has_alpha) log << " vs alpha = " << format_g17(report.alpha);
    log << " over t in [" << format_g17(report.fit_window_low) << ", "
        << format_g17(report.fit_window_high) << "], " << paths << " paths\n";
    return report;
}

// ---------------------------------------------------------------------------
// self-test
// ---------------------------------------------------------------------------

namespace {

struct SelfTest {
    const char* name;
    bool (*check)(std::uint64_t seed, int workers);
};

bool st_mesh(std::uint64_t, int) {
    const RefinedMesh mesh = refine(build_uniform(1.0, 4), 0.5);
    const double expect[] = {0.0, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0};
    if (mesh.size() != 7) return false;
    for (int l = 0; l < 7; ++l) {
        if (std::abs(mesh.point(l) - expect[l]) > 1e-15) return false;
    }
    const IntervalLocator loc = mesh.locate(0.375);
    return loc.interval == 1 && std::abs(loc.fraction - 0.5) < 1e-12;
}

bool st_brownian_refinement(std::uint64_t seed, int) {
    BrownianPath path(1, seed, 7);
    const RefinedMesh coarse = refine(build_uniform(1.0, 4), 0.5);
    path.presample(coarse.points);
    std::vector<double> before;
    for (const double t : coarse.points) before.push_back(path.query(t)(0));
    const RefinedMesh fine = refine(build_uniform(1.0, 8), 0.5);
    path.presample(fine.points);
    for (std::size_t i = 0; i < coarse.points.size(); ++i) {
        if (path.query(coarse.points[i])(0) != before[i]) return false;
    }
    return true;
}

bool st_brownian_moments(std::uint64_t seed, int) {
    const int n = 400;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        BrownianPath path(1, seed, static_cast<std::uint64_t>(i));
        const double z = path.increment(0.0, 0.25)(0) / 0.5;
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    return std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)) && var > 0.75 &&
           var < 1.25;
}

bool st_series(std::uint64_t, int) {
    const PantographSeries series(-1.0, 0.5, 0.5, 1.0);
    return series.coefficients()[1] == -0.5 && series.coefficients()[2] == 0.1875 &&
           series.coefficients()[3] == -0.0546875;
}

bool st_alpha(std::uint64_t seed, int) {
    RandomStream rng(seed, 77);
    for (int i = 0; i < 100; ++i) {
        const double b = rng.uniform(0.05, 2.0);
        const double c = rng.uniform(0.05, 2.0);
        const double d = rng.uniform(0.05, 2.0);
        const double q = rng.uniform(0.1, 0.9);
        const double a = -0.5 * (b + 2.0 * c * c) - rng.uniform(0.01, 3.0);
        const double alpha = alpha_ms(a, b, c, d, q);
        const double residual =
            2.0 * a + b + 2.0 * c * c + (b + 2.0 * d * d) * std::pow(q, alpha);
        if (std::abs(residual) > 1e-10) return false;
    }
    return true;
}

bool st_scheme_constant(std::uint64_t seed, int) {
    SpdeProblem p = make_linear(0.0, 0.0, 0.0, 0.0, 0.5, 1.0);
    const auto mesh = std::make_shared<RefinedMesh>(refine(build_uniform(1.0, 8), 0.5));
    BrownianPath path(1, seed, 3);
    path.presample(mesh->points);
    const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
    for (int l = 0; l < traj.size(); ++l) {
        if (traj.values()(0, l) != 1.0) return false;
    }
    return true;
}

bool st_scheme_steps(std::uint64_t seed, int) {
    SpdeProblem p = make_drift_only(-1.0, 0.5, 0.5, 1.0);
    const auto mesh = std::make_shared<RefinedMesh>(refine(build_uniform(1.0, 4), 0.5));
    BrownianPath path(1, seed, 0);
    path.presample(mesh->points);
    const Trajectory explicit_traj = integrate(p, mesh, path, SchemeConfig{0.0, 1e-12, 50});
    if (std::abs(explicit_traj.value_at(0.25)(0) - 0.875) > 1e-15) return false;

    // One fully implicit step given y(t_1) = 0.875: y = 0.875 + h(-y + 0.5 * 0.875).
    const auto stage = [](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
        out(0) = 0.875 + 0.25 * (-z(0) + 0.5 * 0.875);
    };
    const ImplicitSolution sol = solve_implicit(
        stage, Eigen::VectorXd::Constant(1, 0.875), SchemeConfig{1.0, 1e-12, 50});
    return std::abs(sol.value(0) - 0.7875) < 1e-10;
}

bool st_predicates(std::uint64_t seed, int) {
    RandomStream rng(seed, 99);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-6.0, 1.0);
        const double b = rng.uniform(0.01, 1.5);
        const double c = rng.uniform(0.01, 1.5);
        const double d = rng.uniform(0.01, 1.5);
        const double q = rng.uniform(0.1, 0.9);
        const AsVerdict as = check_as_stable(a, b, c, d, q);
        if (as.stable) {
            if (!check_ms_stable(a, b, c, d)) return false;
            if (!(alpha_ms(a, b, c, d, q) < -1.0)) return false;
        }
    }
    // Boundary: sums exactly zero are classified unstable (strict inequality).
    return !check_ms_stable(-1.25, 0.5, 0.5, 0.5) &&
           !check_as_stable(-1.5, 0.5, 0.5, 0.5, 0.5).stable;
}

bool st_ou_moment(std::uint64_t seed, int workers) {
    const SpdeProblem p = make_ou(-1.0, 1.0, 1.0, 0.5);
    const auto mesh = std::make_shared<RefinedMesh>(refine(build_uniform(1.0, 64), 0.5));
    const int paths = 2000;
    std::vector<double> partial(static_cast<std::size_t>(block_count(paths)), 0.0);
    std::vector<double> partial_sq(static_cast<std::size_t>(block_count(paths)), 0.0);
    parallel_blocks(paths, workers, [&](int block, int first, int last) {
        for (int i = first; i < last; ++i) {
            BrownianPath path(1, seed, static_cast<std::uint64_t>(i));
            path.presample(mesh->points);
            const Trajectory traj = integrate(p, mesh, path, SchemeConfig{0.5, 1e-12, 50});
            const double v = traj.value_at(1.0).squaredNorm();
            partial[static_cast<std::size_t>(block)] += v;
            partial_sq[static_cast<std::size_t>(block)] += v * v;
        }
    });
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        sum += partial[i];
        sum_sq += partial_sq[i];
    }
    const double mean = sum / paths;
    const double se = std::sqrt(std::max(0.0, sum_sq / paths - mean * mean) / paths);
    const double exact = ou_second_moment(-1.0, 1.0, 1.0, 1.0);
    return std::abs(mean - exact) < 4.0 * se + 1e-3;
}

}  // namespace

int run_self_test(std::uint64_t seed, int workers, std::ostream& log) {
    static const SelfTest tests[] = {
        {"mesh refinement and locators", st_mesh},
        {"brownian refinement consistency", st_brownian_refinement},
        {"brownian increment moments", st_brownian_moments},
        {"pantograph series coefficients", st_series},
        {"alpha root residuals", st_alpha},
        {"scheme preserves constants", st_scheme_constant},
        {"scheme explicit/implicit steps", st_scheme_steps},
        {"stability predicate logic", st_predicates},
        {"ou second moment", st_ou_moment},
    };
    int failures = 0;
    for (const SelfTest& test : tests) {
        const bool ok = test.check(seed, workers);
        log << (ok ? "[ok]   " : "[FAIL] ") << test.name << "\n";
        if (!ok) ++failures;
    }
    log << (failures == 0 ? "self-test passed" : "self-test FAILED") << " ("
        << std::size(tests) - static_cast<std::size_t>(failures) << "/" << std::size(tests)
        << ")\n";
    return failures;
}

// ---------------------------------------------------------------------------
// CLI entry
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and analysis toolkit for stochastic pantograph equations"};
    app.name("pansde");
    app.require_subcommand(1);

    struct SubOptions {
        std::string config_path;
        std::string out_dir = ".";
        std::uint64_t seed = 0;
        bool seed_given = false;
        int workers = -1;
    };
    static const char* kCommands[] = {"analyze",     "simulate",      "convergence",
                                      "consistency", "stability-fit", "self-test"};
    std::map<std::string, SubOptions> options;
    for (const char* name : kCommands) {
        CLI::App* sub = app.add_subcommand(name, "");
        SubOptions& opt = options[name];
        CLI::Option* config_opt =
            sub->add_option("--config", opt.config_path, "experiment config file");
        if (std::string(name) != "self-test") config_opt->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "master seed (overrides config)")
            ->each([&opt](const std::string&) { opt.seed_given = true; });
        sub->add_option("--workers", opt.workers, "worker threads (overrides config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const SubOptions& opt = options[command];

    try {
        ExperimentConfig config;
        if (!opt.config_path.empty()) {
            config = parse_config_file(opt.config_path);
        }
        if (opt.seed_given) {
            config.seed = opt.seed;
            config.has_seed = true;
        }
        if (opt.workers >= 0) config.workers = opt.workers;

        if (command == "self-test") {
            const int failures = run_self_test(config.has_seed ? config.seed : 1,
                                               effective_workers(config), out);
            return failures == 0 ? 0 : 4;
        }

        validate_config(config, command);
        const std::filesystem::path out_dir(opt.out_dir);
        std::filesystem::create_directories(out_dir);

        if (command == "analyze") {
            run_analyze(config, out_dir, out);
        } else if (command == "simulate") {
            run_simulate(config, out_dir, out);
        } else if (command == "convergence") {
            run_convergence(config, out_dir, out);
        } else if (command == "consistency") {
            run_consistency(config, out_dir, out);
        } else if (command == "stability-fit") {
            run_stability_fit(config, out_dir, out);
        }
        return 0;
    } catch (const Error& e) {
        err << "pansde " << command << ": " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::ConfigError:
            case ErrorCode::InvalidArgument:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        err << "pansde " << command << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace pansde::cli
