#include "pansde/parallel.hpp"

#include <algorithm>
#include <mutex>

namespace pansde {

void parallel_blocks(int total, int workers,
                     const std::function<void(int, int, int)>& body) {
    if (total <= 0) return;
    const int blocks = block_count(total);
    workers = std::clamp(workers, 1, blocks);

    std::atomic<int> next_block{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    int first_error_block = blocks;

    const auto run = [&]() {
        while (true) {
            const int block = next_block.fetch_add(1);
            if (block >= blocks) return;
            const int first = block * kReductionBlock;
            const int last = std::min(total, first + kReductionBlock);
            try {
                body(block, first, last);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (block < first_error_block) {
                    first_error_block = block;
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pansde
