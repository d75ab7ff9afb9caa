#include "pansde/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace pansde {

UniformMesh build_uniform(double horizon, int step_count) {
    require(std::isfinite(horizon) && horizon > 0.0, ErrorCode::InvalidArgument,
            "build_uniform: horizon must be positive and finite");
    require(step_count >= 1, ErrorCode::InvalidArgument,
            "build_uniform: step_count must be at least 1");
    const double step = horizon / static_cast<double>(step_count);
    require(step < 1.0, ErrorCode::InvalidArgument,
            "build_uniform: step h = horizon/step_count must satisfy h < 1");

    UniformMesh mesh;
    mesh.horizon = horizon;
    mesh.step_count = step_count;
    mesh.step = step;
    mesh.points.resize(static_cast<std::size_t>(step_count) + 1);
    // Points are n*h, not accumulated sums, so locators stay bit-stable.
    for (int n = 0; n <= step_count; ++n) {
        mesh.points[static_cast<std::size_t>(n)] = static_cast<double>(n) * step;
    }
    mesh.points.back() = horizon;
    return mesh;
}

namespace {

struct TaggedPoint {
    double value;
    bool grid;
    int origin;  // grid index n, or delay source n
};

}  // namespace

RefinedMesh refine(const UniformMesh& mesh, double ratio) {
    require(mesh.step_count >= 1 && !mesh.points.empty(), ErrorCode::InvalidArgument,
            "refine: uninitialized uniform mesh");
    require(ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument,
            "refine: ratio must lie in (0, 1)");

    const int n_steps = mesh.step_count;
    const double tol = time_snap_tolerance(mesh.horizon);

    std::vector<TaggedPoint> tagged;
    tagged.reserve(2 * static_cast<std::size_t>(n_steps) + 2);
    for (int n = 0; n <= n_steps; ++n) {
        tagged.push_back({mesh.point(n), true, n});
    }
    for (int n = 0; n <= n_steps; ++n) {
        tagged.push_back({ratio * mesh.point(n), false, n});
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const TaggedPoint& a, const TaggedPoint& b) {
                         if (a.value != b.value) return a.value < b.value;
                         return a.grid && !b.grid;  // grid representative first
                     });

    RefinedMesh refined;
    refined.base = mesh;
    refined.ratio = ratio;
    refined.snap_tol = tol;
    refined.grid_index.assign(static_cast<std::size_t>(n_steps) + 1, -1);
    refined.delayed_index.assign(static_cast<std::size_t>(n_steps) + 1, -1);

    for (const TaggedPoint& tp : tagged) {
        const bool merge =
            !refined.points.empty() && nearly_equal_time(tp.value, refined.points.back(), tol);
        if (!merge) {
            refined.points.push_back(tp.value);
            refined.kinds.push_back(tp.grid ? PointKind::Grid : PointKind::Delayed);
        } else if (refined.kinds.back() != (tp.grid ? PointKind::Grid : PointKind::Delayed)) {
            refined.kinds.back() = PointKind::Both;
        }
        const int index = refined.size() - 1;
        if (tp.grid) {
            refined.grid_index[static_cast<std::size_t>(tp.origin)] = index;
        } else {
            refined.delayed_index[static_cast<std::size_t>(tp.origin)] = index;
        }
    }

    refined.locators.resize(refined.points.size());
    refined.locators[0] = IntervalLocator{-1, 0.0};
    for (int l = 1; l < refined.size(); ++l) {
        refined.locators[static_cast<std::size_t>(l)] = refined.locate(refined.point(l));
    }
    return refined;
}

int RefinedMesh::index_of(double s) const {
    const auto it = std::lower_bound(points.begin(), points.end(), s - snap_tol);
    if (it == points.end()) return -1;
    if (!nearly_equal_time(*it, s, snap_tol)) return -1;
    return static_cast<int>(it - points.begin());
}

IntervalLocator RefinedMesh::locate(double s) const {
    require(s > snap_tol, ErrorCode::InvalidArgument,
            "locate: s = 0 has no enclosing half-open interval");
    require(index_of(s) >= 0, ErrorCode::InvalidArgument, "locate: s is not a mesh point");

    const double h = base.step;
    double r = s / h;
    const double nearest = std::round(r);
    if (std::abs(r - nearest) * h <= snap_tol) r = nearest;  // snap to the grid
    int interval = static_cast<int>(std::ceil(r)) - 1;
    interval = std::clamp(interval, 0, base.step_count - 1);
    const double fraction = r - static_cast<double>(interval);
    return IntervalLocator{interval, fraction};
}

}  // namespace pansde
