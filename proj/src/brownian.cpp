#include "pansde/brownian.hpp"

#include <algorithm>
#include <cmath>

namespace pansde {

BrownianPath::BrownianPath(int dimension, std::uint64_t seed, std::uint64_t path_index,
                           bool antithetic, double snap_tol)
    : dim_(dimension),
      seed_(seed),
      path_index_(path_index),
      antithetic_(antithetic),
      snap_tol_(snap_tol),
      rng_(seed, path_index) {
    require(dimension >= 1, ErrorCode::InvalidArgument,
            "BrownianPath: dimension must be positive");
    require(snap_tol > 0.0, ErrorCode::InvalidArgument,
            "BrownianPath: snap tolerance must be positive");
    times_.push_back(0.0);
    values_.assign(static_cast<std::size_t>(dim_), 0.0);  // B(0) = 0 exactly
}

int BrownianPath::find(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - snap_tol_);
    if (it == times_.end()) return -1;
    if (!nearly_equal_time(*it, t, snap_tol_)) return -1;
    return static_cast<int>(it - times_.begin());
}

int BrownianPath::sample_at(double t) {
    const auto insert_pos = std::lower_bound(times_.begin(), times_.end(), t);
    const int index = static_cast<int>(insert_pos - times_.begin());
    const bool beyond = insert_pos == times_.end();

    Eigen::VectorXd draw(dim_);
    for (int i = 0; i < dim_; ++i) {
        const double z = rng_.normal();
        draw[i] = antithetic_ ? -z : z;
    }

    Eigen::VectorXd sample(dim_);
    if (beyond) {
        const double t_last = times_.back();
        sample = value(index - 1) + std::sqrt(t - t_last) * draw;
    } else {
        // Bridge between the sampled neighbours t_lo < t < t_hi.
        const double t_hi = times_[static_cast<std::size_t>(index)];
        const double t_lo = times_[static_cast<std::size_t>(index) - 1];
        const double span = t_hi - t_lo;
        const double w = (t - t_lo) / span;
        const double sd = std::sqrt((t - t_lo) * (t_hi - t) / span);
        sample = value(index - 1) + w * (value(index) - value(index - 1)).eval() + sd * draw;
    }

    times_.insert(insert_pos, t);
    values_.insert(values_.begin() + static_cast<std::ptrdiff_t>(index) * dim_,
                   sample.data(), sample.data() + dim_);
    return index;
}

Eigen::VectorXd BrownianPath::query(double t) {
    require(std::isfinite(t), ErrorCode::InvalidArgument, "BrownianPath: time must be finite");
    require(t >= -snap_tol_, ErrorCode::InvalidArgument,
            "BrownianPath: time must be non-negative");
    if (observer_) observer_(t);
    int index = find(t);
    if (index < 0) index = sample_at(t);
    return value(index);
}

Eigen::VectorXd BrownianPath::increment(double t1, double t2) {
    require(t2 >= t1 - snap_tol_, ErrorCode::InvalidArgument,
            "BrownianPath: increment needs t1 <= t2");
    const Eigen::VectorXd left = query(t1);
    const Eigen::VectorXd right = query(t2);
    return right - left;
}

void BrownianPath::presample(std::span<const double> times) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        require(times[i] >= times[i - 1], ErrorCode::InvalidArgument,
                "BrownianPath: presample times must be ascending");
    }
    for (const double t : times) query(t);
}

}  // namespace pansde
