#pragma once

#include <vector>

#include "pansde/common.hpp"

namespace pansde {

/// Equally spaced grid t_n = n*h covering [0, horizon] with h = horizon/N.
/// The step must satisfy h < 1.
struct UniformMesh {
    double horizon = 0.0;
    int step_count = 0;  // N
    double step = 0.0;   // h = horizon / N
    std::vector<double> points;

    double point(int n) const { return points[static_cast<std::size_t>(n)]; }
};

/// Position of a refined point inside the uniform grid:
/// s = t_interval + fraction * h with fraction in (0, 1].
struct IntervalLocator {
    int interval = -1;      // n, with t_n < s <= t_{n+1}
    double fraction = 0.0;  // zeta
};

enum class PointKind {
    Grid,     // some t_n only
    Delayed,  // some q*t_n only
    Both,     // a t_n that coincides with a q*t_m
};

/// Uniform grid merged with every proportional point q*t_n, sorted and
/// deduplicated. Immutable after construction; safe to share across threads.
struct RefinedMesh {
    UniformMesh base;
    double ratio = 0.0;  // q
    double snap_tol = 0.0;

    std::vector<double> points;
    std::vector<IntervalLocator> locators;  // locators[0] is the sentinel {-1, 0}
    std::vector<PointKind> kinds;

    /// Refined index of grid point t_n.
    std::vector<int> grid_index;
    /// Refined index of the point representing ratio*t_n.
    std::vector<int> delayed_index;

    double point(int l) const { return points[static_cast<std::size_t>(l)]; }
    int size() const { return static_cast<int>(points.size()); }

    /// Index of the refined point equal to s within snap_tol, or -1.
    int index_of(double s) const;

    /// Locator of a refined point s > 0; O(1) index arithmetic. Throws when s
    /// is not a mesh point or s == 0.
    IntervalLocator locate(double s) const;
};

/// Builds the uniform grid. Rejects horizon <= 0, step_count < 1 and steps
/// with h >= 1.
UniformMesh build_uniform(double horizon, int step_count);

/// Merges {t_n} with {ratio * t_n}; requires ratio in (0, 1). Points closer
/// than the snap tolerance are identified, keeping the grid representative.
RefinedMesh refine(const UniformMesh& mesh, double ratio);

/// True when the delayed argument of step n lands inside the step's own
/// interval, i.e. ratio*t_{n+1} > t_n. Holds exactly for n < ratio/(1-ratio).
inline bool coupling_step(int n, double ratio) {
    return ratio * static_cast<double>(n + 1) > static_cast<double>(n);
}

}  // namespace pansde
