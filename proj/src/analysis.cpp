#include "pansde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pansde/parallel.hpp"

namespace pansde {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double slope_stderr = 0.0;
    int n = 0;
};

LineFit line_fit(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
        sxy += (x[i] - mean_x) * (y[i] - mean_y);
    }
    require(sxx > 0.0, ErrorCode::InvalidArgument, "fit: all abscissae coincide");

    LineFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / n);
    if (n > 2) fit.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
    return fit;
}

double student_t_975(int dof) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                       2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                       2.131,  2.120, 2.110, 2.101, 2.093, 2.086};
    if (dof <= 0) return 0.0;
    if (dof <= 20) return table[dof - 1];
    if (dof <= 30) return 2.06;
    return 1.96;
}

}  // namespace

OrderFit fit_order(std::span<const double> step_sizes, std::span<const double> errors) {
    require(step_sizes.size() == errors.size(), ErrorCode::InvalidArgument,
            "fit_order: step and error lists must align");
    require(step_sizes.size() >= 3, ErrorCode::InvalidArgument,
            "fit_order: at least 3 step sizes are required");
    for (std::size_t i = 0; i < step_sizes.size(); ++i) {
        require(step_sizes[i] > 0.0, ErrorCode::InvalidArgument,
                "fit_order: step sizes must be positive");
        require(errors[i] >= 0.0, ErrorCode::InvalidArgument,
                "fit_order: errors must be non-negative");
        if (errors[i] == 0.0) {
            fail(ErrorCode::ZeroError,
                 "fit_order: ZERO_ERROR - an exactly zero error has no log-log order");
        }
    }

    std::vector<double> log_h(step_sizes.size());
    std::vector<double> log_e(step_sizes.size());
    for (std::size_t i = 0; i < step_sizes.size(); ++i) {
        log_h[i] = std::log(step_sizes[i]);
        log_e[i] = std::log(errors[i]);
    }
    const LineFit fit = line_fit(log_h, log_e);

    OrderFit out;
    out.step_sizes.assign(step_sizes.begin(), step_sizes.end());
    out.errors.assign(errors.begin(), errors.end());
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.residual_norm = fit.residual_rms;
    out.slope_stderr = fit.slope_stderr;
    out.slope_ci95 = fit.slope_stderr * student_t_975(fit.n - 2);
    return out;
}

double alpha_ms(double a, double b, double c, double d, double ratio) {
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "alpha_ms: ratio must lie in (0, 1)");
    const double decay = 2.0 * a + b + 2.0 * c * c;   // coefficient of the undelayed term
    const double feedback = b + 2.0 * d * d;          // coefficient of the delayed term
    if (!(feedback > 0.0) || !(decay < 0.0)) {
        fail(ErrorCode::NoRealRoot,
             "alpha_ms: NO_REAL_ROOT - needs 2a + b + 2c^2 < 0 < b + 2d^2");
    }
    return std::log(-decay / feedback) / std::log(ratio);
}

bool check_ms_stable(double a, double b, double c, double d) {
    require(b > 0.0 && c > 0.0 && d > 0.0, ErrorCode::InvalidArgument,
            "check_ms_stable: b, c, d must be positive");
    return a + b + c * c + d * d < 0.0;
}

AsVerdict check_as_stable(double a, double b, double c, double d, double ratio) {
    require(b > 0.0 && c > 0.0 && d > 0.0, ErrorCode::InvalidArgument,
            "check_as_stable: b, c, d must be positive");
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "check_as_stable: ratio must lie in (0, 1)");
    AsVerdict verdict;
    verdict.stable = 2.0 * a + b + 2.0 * c * c + (b + 2.0 * d * d) / ratio < 0.0;
    if (verdict.stable) {
        verdict.rate = 0.5 * (1.0 + alpha_ms(a, b, c, d, ratio));
    }
    return verdict;
}

StabilityReport make_stability_report(double a, double b, double c, double d, double ratio) {
    StabilityReport report;
    report.ms_stable = check_ms_stable(a, b, c, d);
    const AsVerdict as = check_as_stable(a, b, c, d, ratio);
    report.as_stable = as.stable;
    try {
        report.alpha = alpha_ms(a, b, c, d, ratio);
        report.has_alpha = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRealRoot) throw;
        report.has_alpha = false;
    }
    if (report.as_stable) report.as_rate = as.rate;
    return report;
}

namespace {

DecayFit tail_decay_fit(std::span<const double> times, std::span<const double> values,
                        const char* what) {
    require(times.size() == values.size() && times.size() >= 2, ErrorCode::InvalidArgument,
            std::string(what) + ": need at least two aligned samples");
    std::vector<double> log_t;
    std::vector<double> log_v;
    DecayFit fit;
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(times[i] > 1.0, ErrorCode::InvalidArgument,
                std::string(what) + ": tail window must satisfy t > 1");
        if (values[i] > 0.0) {
            log_t.push_back(std::log(times[i]));
            log_v.push_back(std::log(values[i]));
        } else {
            fit.noise_floor = true;
        }
    }
    require(log_t.size() >= 2, ErrorCode::InvalidArgument,
            std::string(what) + ": fewer than two positive samples in the window");
    const LineFit line = line_fit(log_t, log_v);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.samples_used = line.n;
    return fit;
}

}  // namespace

DecayFit fit_ms_decay(std::span<const double> times, std::span<const double> values) {
    return tail_decay_fit(times, values, "fit_ms_decay");
}

DecayFit fit_pathwise_decay(std::span<const double> times, std::span<const double> values) {
    return tail_decay_fit(times, values, "fit_pathwise_decay");
}

// ---------------------------------------------------------------------------
// Strong error study
// ---------------------------------------------------------------------------

StrongErrorResult strong_error(const SpdeProblem& problem, const StrongErrorParams& params) {
    require(params.paths >= 1, ErrorCode::InvalidArgument, "strong_error: paths must be >= 1");
    require(params.step_counts.size() >= 3, ErrorCode::InvalidArgument,
            "strong_error: need at least 3 step sizes");
    require(params.fine_factor >= 2, ErrorCode::InvalidArgument,
            "strong_error: fine_factor must be >= 2");

    std::vector<int> steps = params.step_counts;
    std::sort(steps.begin(), steps.end());
    require(std::adjacent_find(steps.begin(), steps.end()) == steps.end(),
            ErrorCode::InvalidArgument, "strong_error: duplicate step counts");
    const int coarsest = steps.front();
    const long fine_steps = static_cast<long>(steps.back()) * params.fine_factor;
    for (const int n : steps) {
        require(n >= 1 && n % coarsest == 0 && fine_steps % n == 0, ErrorCode::InvalidArgument,
                "strong_error: step counts must nest with each other and the reference");
    }

    const int n_h = static_cast<int>(steps.size());
    std::vector<std::shared_ptr<const RefinedMesh>> meshes;
    meshes.reserve(static_cast<std::size_t>(n_h));
    for (const int n : steps) {
        meshes.push_back(std::make_shared<RefinedMesh>(
            refine(build_uniform(params.horizon, n), problem.delay_ratio)));
    }
    const auto fine = std::make_shared<RefinedMesh>(
        refine(build_uniform(params.horizon, static_cast<int>(fine_steps)),
               problem.delay_ratio));

    // Shared comparison set: every refined point of the coarsest mesh. Resolve
    // its index in each mesh once.
    const std::vector<double>& cmp = meshes.front()->points;
    const int n_cmp = static_cast<int>(cmp.size());
    std::vector<std::vector<int>> cmp_index(static_cast<std::size_t>(n_h));
    std::vector<int> fine_index(static_cast<std::size_t>(n_cmp));
    for (int j = 0; j < n_h; ++j) {
        cmp_index[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(n_cmp));
        for (int k = 0; k < n_cmp; ++k) {
            const int idx = meshes[static_cast<std::size_t>(j)]->index_of(cmp[k]);
            require(idx >= 0, ErrorCode::InvalidArgument,
                    "strong_error: comparison point missing from a mesh");
            cmp_index[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = idx;
        }
    }
    for (int k = 0; k < n_cmp; ++k) {
        const int idx = fine->index_of(cmp[k]);
        require(idx >= 0, ErrorCode::InvalidArgument,
                "strong_error: comparison point missing from the reference mesh");
        fine_index[static_cast<std::size_t>(k)] = idx;
    }

    struct Partial {
        Eigen::MatrixXd sum_sq;     // n_h x n_cmp, sum of |error|^2
        Eigen::MatrixXd sum_sq_sq;  // sum of |error|^4, for standard errors
    };
    std::vector<Partial> partials(static_cast<std::size_t>(block_count(params.paths)));
    for (auto& p : partials) {
        p.sum_sq = Eigen::MatrixXd::Zero(n_h, n_cmp);
        p.sum_sq_sq = Eigen::MatrixXd::Zero(n_h, n_cmp);
    }

    const double snap = time_snap_tolerance(params.horizon);
    parallel_blocks(params.paths, params.workers, [&](int block, int first, int last) {
        Partial& acc = partials[static_cast<std::size_t>(block)];
        for (int i = first; i < last; ++i) {
            BrownianPath path(problem.noise_dim, params.seed,
                              static_cast<std::uint64_t>(i), false, snap);
            path.presample(fine->points);
            const Trajectory ref = [&]() {
                try {
                    return integrate(problem, fine, path, params.scheme);
                } catch (const Error& e) {
                    fail(e.code(), std::string(e.what()) + " [path " + std::to_string(i) +
                                       ", reference]");
                }
            }();
            for (int j = 0; j < n_h; ++j) {
                Trajectory coarse = [&]() {
                    try {
                        return integrate(problem, meshes[static_cast<std::size_t>(j)], path,
                                         params.scheme);
                    } catch (const Error& e) {
                        fail(e.code(), std::string(e.what()) + " [path " + std::to_string(i) +
                                           ", N = " + std::to_string(steps[j]) + "]");
                    }
                }();
                for (int k = 0; k < n_cmp; ++k) {
                    const double err2 =
                        (ref.values().col(fine_index[static_cast<std::size_t>(k)]) -
                         coarse.values().col(
                             cmp_index[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]))
                            .squaredNorm();
                    acc.sum_sq(j, k) += err2;
                    acc.sum_sq_sq(j, k) += err2 * err2;
                }
            }
        }
    });

    const Partial total =
        reduce_pairwise(std::move(partials), [](Partial& into, const Partial& from) {
            into.sum_sq += from.sum_sq;
            into.sum_sq_sq += from.sum_sq_sq;
        });

    const double inv_paths = 1.0 / static_cast<double>(params.paths);
    std::vector<double> h_list(static_cast<std::size_t>(n_h));
    std::vector<double> e_list(static_cast<std::size_t>(n_h));
    std::vector<double> se_list(static_cast<std::size_t>(n_h));
    for (int j = 0; j < n_h; ++j) {
        h_list[static_cast<std::size_t>(j)] = params.horizon / steps[static_cast<std::size_t>(j)];
        int argmax = 0;
        double worst = -1.0;
        for (int k = 0; k < n_cmp; ++k) {
            if (total.sum_sq(j, k) > worst) {
                worst = total.sum_sq(j, k);
                argmax = k;
            }
        }
        const double mean2 = total.sum_sq(j, argmax) * inv_paths;
        const double rms = std::sqrt(mean2);
        const double var2 =
            std::max(0.0, total.sum_sq_sq(j, argmax) * inv_paths - mean2 * mean2);
        const double se_mean2 = std::sqrt(var2 * inv_paths);
        e_list[static_cast<std::size_t>(j)] = rms;
        se_list[static_cast<std::size_t>(j)] = rms > 0.0 ? se_mean2 / (2.0 * rms) : 0.0;
    }

    StrongErrorResult result;
    result.fit = fit_order(h_list, e_list);
    result.stderrs = std::move(se_list);
    result.comparison_times = cmp;
    return result;
}

// ---------------------------------------------------------------------------
// Consistency orders
// ---------------------------------------------------------------------------

namespace {

int grid_step_at_or_below(double anchor, double step) {
    return static_cast<int>(std::floor(anchor / step + 1e-9));
}

}  // namespace

ConsistencyResult consistency_orders(const SpdeProblem& problem,
                                     const ConsistencyParams& params) {
    require(params.paths >= 1, ErrorCode::InvalidArgument,
            "consistency_orders: paths must be >= 1");
    require(!params.antithetic || params.paths % 2 == 0, ErrorCode::InvalidArgument,
            "consistency_orders: antithetic pairing needs an even path count");
    require(params.step_counts.size() >= 3, ErrorCode::InvalidArgument,
            "consistency_orders: need at least 3 step sizes");
    require(params.fraction > 0.0 && params.fraction <= 1.0, ErrorCode::InvalidArgument,
            "consistency_orders: fraction must lie in (0, 1]");
    require(params.anchor_time > 0.0 && params.anchor_time < params.horizon,
            ErrorCode::InvalidArgument,
            "consistency_orders: anchor must lie inside (0, horizon)");
    require(params.fine_factor >= 2, ErrorCode::InvalidArgument,
            "consistency_orders: fine_factor must be >= 2");

    std::vector<int> steps = params.step_counts;
    std::sort(steps.begin(), steps.end());
    require(std::adjacent_find(steps.begin(), steps.end()) == steps.end(),
            ErrorCode::InvalidArgument, "consistency_orders: duplicate step counts");
    const int n_h = static_cast<int>(steps.size());
    std::vector<double> h_list(static_cast<std::size_t>(n_h));
    for (int j = 0; j < n_h; ++j) {
        h_list[static_cast<std::size_t>(j)] =
            params.horizon / static_cast<double>(steps[static_cast<std::size_t>(j)]);
    }
    const double h_max = h_list.front();
    const double h_ref = h_list.back() / params.fine_factor;

    // The reference only has to reach past the last defect evaluation.
    const double cover =
        (params.scan_all_steps ? params.horizon : params.anchor_time) + h_max;
    const int ref_steps = static_cast<int>(std::ceil(cover / h_ref - 1e-9));
    const auto ref_mesh = std::make_shared<RefinedMesh>(
        refine(build_uniform(static_cast<double>(ref_steps) * h_ref, ref_steps),
               problem.delay_ratio));

    // Anchor grid point per step size, and the anchor list for the scan.
    std::vector<int> anchor_step(static_cast<std::size_t>(n_h));
    std::vector<int> scan_steps(static_cast<std::size_t>(n_h), 0);
    for (int j = 0; j < n_h; ++j) {
        anchor_step[static_cast<std::size_t>(j)] =
            grid_step_at_or_below(params.anchor_time, h_list[static_cast<std::size_t>(j)]);
        if (params.scan_all_steps) {
            scan_steps[static_cast<std::size_t>(j)] = static_cast<int>(
                std::floor(params.horizon / h_list[static_cast<std::size_t>(j)] + 1e-9));
        }
    }

    const int d = problem.state_dim;
    const int samples = params.antithetic ? params.paths / 2 : params.paths;

    struct Partial {
        Eigen::MatrixXd mean_sum;       // d x n_h, sum of (pair-averaged) defects
        Eigen::MatrixXd mean_sum_sq;    // componentwise squares, for stderr
        Eigen::VectorXd rms_sum;        // n_h, sum of |delta|^2 over raw samples
        Eigen::VectorXd rms_sum_sq;     // sum of |delta|^4
        std::vector<Eigen::MatrixXd> scan_mean;  // per h: d x N_scan
        std::vector<Eigen::VectorXd> scan_sq;    // per h: N_scan
    };
    std::vector<Partial> partials(static_cast<std::size_t>(block_count(samples)));
    for (auto& p : partials) {
        p.mean_sum = Eigen::MatrixXd::Zero(d, n_h);
        p.mean_sum_sq = Eigen::MatrixXd::Zero(d, n_h);
        p.rms_sum = Eigen::VectorXd::Zero(n_h);
        p.rms_sum_sq = Eigen::VectorXd::Zero(n_h);
        if (params.scan_all_steps) {
            p.scan_mean.resize(static_cast<std::size_t>(n_h));
            p.scan_sq.resize(static_cast<std::size_t>(n_h));
            for (int j = 0; j < n_h; ++j) {
                p.scan_mean[static_cast<std::size_t>(j)] =
                    Eigen::MatrixXd::Zero(d, scan_steps[static_cast<std::size_t>(j)]);
                p.scan_sq[static_cast<std::size_t>(j)] =
                    Eigen::VectorXd::Zero(scan_steps[static_cast<std::size_t>(j)]);
            }
        }
    }

    const double snap = time_snap_tolerance(params.horizon);
    parallel_blocks(samples, params.workers, [&](int block, int first, int last) {
        Partial& acc = partials[static_cast<std::size_t>(block)];
        for (int i = first; i < last; ++i) {
            const int twins = params.antithetic ? 2 : 1;
            Eigen::MatrixXd pair_delta = Eigen::MatrixXd::Zero(d, n_h);
            std::vector<Eigen::MatrixXd> scan_pairs;
            if (params.scan_all_steps) {
                scan_pairs.resize(static_cast<std::size_t>(n_h));
                for (int j = 0; j < n_h; ++j) {
                    scan_pairs[static_cast<std::size_t>(j)] =
                        Eigen::MatrixXd::Zero(d, scan_steps[static_cast<std::size_t>(j)]);
                }
            }
            for (int twin = 0; twin < twins; ++twin) {
                BrownianPath path(problem.noise_dim, params.seed,
                                  static_cast<std::uint64_t>(i), twin == 1, snap);
                path.presample(ref_mesh->points);
                const Trajectory ref = integrate(problem, ref_mesh, path, params.scheme);
                const auto lookup = ref.as_reference();
                for (int j = 0; j < n_h; ++j) {
                    const double h = h_list[static_cast<std::size_t>(j)];
                    const double t_n = anchor_step[static_cast<std::size_t>(j)] * h;
                    const Eigen::VectorXd delta = local_truncation_sample(
                        problem, lookup, t_n, params.fraction, h, params.scheme.theta, path);
                    pair_delta.col(j) += delta / twins;
                    const double norm2 = delta.squaredNorm();
                    acc.rms_sum(j) += norm2;
                    acc.rms_sum_sq(j) += norm2 * norm2;
                    if (params.scan_all_steps) {
                        for (int n = 0; n < scan_steps[static_cast<std::size_t>(j)]; ++n) {
                            const Eigen::VectorXd dn = local_truncation_sample(
                                problem, lookup, n * h, params.fraction, h,
                                params.scheme.theta, path);
                            scan_pairs[static_cast<std::size_t>(j)].col(n) += dn / twins;
                            acc.scan_sq[static_cast<std::size_t>(j)](n) += dn.squaredNorm();
                        }
                    }
                }
            }
            acc.mean_sum += pair_delta;
            acc.mean_sum_sq += pair_delta.cwiseProduct(pair_delta);
            if (params.scan_all_steps) {
                for (int j = 0; j < n_h; ++j) {
                    acc.scan_mean[static_cast<std::size_t>(j)] +=
                        scan_pairs[static_cast<std::size_t>(j)];
                }
            }
        }
    });

    const Partial total =
        reduce_pairwise(std::move(partials), [&](Partial& into, const Partial& from) {
            into.mean_sum += from.mean_sum;
            into.mean_sum_sq += from.mean_sum_sq;
            into.rms_sum += from.rms_sum;
            into.rms_sum_sq += from.rms_sum_sq;
            for (std::size_t j = 0; j < into.scan_mean.size(); ++j) {
                into.scan_mean[j] += from.scan_mean[j];
                into.scan_sq[j] += from.scan_sq[j];
            }
        });

    ConsistencyResult result;
    const double inv_samples = 1.0 / static_cast<double>(samples);
    const double inv_raw = 1.0 / static_cast<double>(samples * (params.antithetic ? 2 : 1));
    result.mean_defect.resize(static_cast<std::size_t>(n_h));
    result.mean_stderr.resize(static_cast<std::size_t>(n_h));
    result.rms_defect.resize(static_cast<std::size_t>(n_h));
    result.rms_stderr.resize(static_cast<std::size_t>(n_h));
    for (int j = 0; j < n_h; ++j) {
        const Eigen::VectorXd mean = total.mean_sum.col(j) * inv_samples;
        Eigen::VectorXd var =
            (total.mean_sum_sq.col(j) * inv_samples - mean.cwiseProduct(mean))
                .cwiseMax(0.0);
        result.mean_defect[static_cast<std::size_t>(j)] = mean.norm();
        result.mean_stderr[static_cast<std::size_t>(j)] = std::sqrt(var.sum() * inv_samples);

        const double mean2 = total.rms_sum(j) * inv_raw;
        const double var2 = std::max(0.0, total.rms_sum_sq(j) * inv_raw - mean2 * mean2);
        const double rms = std::sqrt(mean2);
        result.rms_defect[static_cast<std::size_t>(j)] = rms;
        result.rms_stderr[static_cast<std::size_t>(j)] =
            rms > 0.0 ? std::sqrt(var2 * inv_raw) / (2.0 * rms) : 0.0;
    }
    if (params.scan_all_steps) {
        result.scan_mean_defect.resize(static_cast<std::size_t>(n_h));
        result.scan_rms_defect.resize(static_cast<std::size_t>(n_h));
        for (int j = 0; j < n_h; ++j) {
            double worst_mean = 0.0;
            double worst_sq = 0.0;
            for (int n = 0; n < scan_steps[static_cast<std::size_t>(j)]; ++n) {
                worst_mean = std::max(
                    worst_mean,
                    (total.scan_mean[static_cast<std::size_t>(j)].col(n) * inv_samples)
                        .norm());
                worst_sq = std::max(
                    worst_sq, total.scan_sq[static_cast<std::size_t>(j)](n) * inv_raw);
            }
            result.scan_mean_defect[static_cast<std::size_t>(j)] = worst_mean;
            result.scan_rms_defect[static_cast<std::size_t>(j)] = std::sqrt(worst_sq);
        }
    }

    // Mean fit on the range where the Monte Carlo noise stays below half the
    // signal; h_list is ordered largest first, so the surviving range is a
    // prefix.
    std::vector<double> fit_h;
    std::vector<double> fit_e;
    for (std::size_t idx = 0; idx < h_list.size(); ++idx) {
        if (result.mean_defect[idx] > 0.0 &&
            result.mean_stderr[idx] <= 0.5 * result.mean_defect[idx]) {
            fit_h.push_back(h_list[idx]);
            fit_e.push_back(result.mean_defect[idx]);
            result.surviving.push_back(static_cast<int>(idx));
        } else {
            result.noise_floor = true;
            break;
        }
    }
    if (fit_h.size() >= 3) {
        result.mean_fit = fit_order(fit_h, fit_e);
    } else {
        // Too little clean signal; report the full-range fit but keep the flag.
        result.noise_floor = true;
        result.mean_fit = fit_order(h_list, result.mean_defect);
        result.surviving.clear();
        for (int j = 0; j < n_h; ++j) result.surviving.push_back(j);
    }
    result.rms_fit = fit_order(h_list, result.rms_defect);
    return result;
}

}  // namespace pansde
