#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pansde/common.hpp"
#include "pansde/rng.hpp"

namespace pansde {

/// Lazily sampled, memoizing m-dimensional Wiener path.
///
/// A query beyond the last sampled time extends the path with a fresh
/// increment; a query between two sampled times draws from the Brownian
/// bridge conditional law. Either way the value is stored and every later
/// query of that time returns it bit-for-bit.
///
/// Values depend on the order in which times are first queried. Experiments
/// that compare step sizes on "the same path" must therefore presample the
/// finest mesh involved first, in ascending time order; nested coarser
/// meshes then only hit memoized samples.
///
/// One path must be confined to a single worker; distinct (seed, path_index)
/// streams are independent and may run in parallel.
class BrownianPath {
public:
    BrownianPath(int dimension, std::uint64_t seed, std::uint64_t path_index = 0,
                 bool antithetic = false, double snap_tol = 1e-12);

    int dimension() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_index() const { return path_index_; }
    bool antithetic() const { return antithetic_; }
    int sample_count() const { return static_cast<int>(times_.size()); }
    std::span<const double> sampled_times() const { return times_; }

    /// B(t). Samples and memoizes on first access; t must be finite and >= 0.
    Eigen::VectorXd query(double t);

    /// B(t2) - B(t1) for 0 <= t1 <= t2; t1 is queried first.
    Eigen::VectorXd increment(double t1, double t2);

    /// Samples every listed time left to right. Input must be ascending.
    void presample(std::span<const double> times);

    /// Test hook: invoked with the time of every query.
    void set_query_observer(std::function<void(double)> observer) {
        observer_ = std::move(observer);
    }

private:
    int find(double t) const;  // index within snap tolerance, or -1
    int sample_at(double t);   // inserts a new sample, returns its index
    Eigen::Map<const Eigen::VectorXd> value(int index) const {
        return Eigen::Map<const Eigen::VectorXd>(
            values_.data() + static_cast<std::size_t>(index) * static_cast<std::size_t>(dim_),
            dim_);
    }

    int dim_;
    std::uint64_t seed_;
    std::uint64_t path_index_;
    bool antithetic_;
    double snap_tol_;
    RandomStream rng_;
    std::vector<double> times_;   // sorted
    std::vector<double> values_;  // dim_ values per sample, same order as times_
    std::function<void(double)> observer_;
};

}  // namespace pansde
