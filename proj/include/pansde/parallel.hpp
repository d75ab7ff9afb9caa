#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace pansde {

/// Fixed block size for path-ensemble reductions. Partial results are
/// accumulated per block in path-index order and combined by a fixed pairwise
/// tree, so ensemble statistics do not depend on the worker count.
inline constexpr int kReductionBlock = 32;

inline int block_count(int total) {
    return (total + kReductionBlock - 1) / kReductionBlock;
}

inline int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(block_index, first, last) over every block of [0, total).
/// Blocks are claimed dynamically, but each writes only its own slot, so the
/// outcome is worker-count invariant. The first exception (by block index) is
/// rethrown.
void parallel_blocks(int total, int workers,
                     const std::function<void(int, int, int)>& body);

/// Pairwise tree reduction of per-block partials; `combine(into, from)` must
/// be associative enough that a fixed tree is acceptable.
template <typename T, typename Combine>
T reduce_pairwise(std::vector<T> partials, Combine combine) {
    while (partials.size() > 1) {
        std::vector<T> next;
        next.reserve((partials.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < partials.size(); i += 2) {
            combine(partials[i], partials[i + 1]);
            next.push_back(std::move(partials[i]));
        }
        if (partials.size() % 2 == 1) next.push_back(std::move(partials.back()));
        partials = std::move(next);
    }
    return std::move(partials.front());
}

}  // namespace pansde
