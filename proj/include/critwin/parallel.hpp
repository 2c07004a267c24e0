// parallel.hpp -- deterministic block-parallel map-reduce.
//
// Work is split into fixed blocks that do not depend on the thread count;
// each block produces a partial result into its own slot, and the slots are
// combined in block order on the calling thread.  Together with per-block RNG
// streams this makes every stochastic result byte-identical for a given seed,
// whether it runs on 1 thread or 64.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace critwin {

// Number of worker threads to use: `requested` if positive, otherwise the
// hardware concurrency (at least 1).
inline int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs block_fn(block_index, item_begin, item_end) for ceil(total/block_size)
// blocks on up to `threads` workers and returns the per-block results in
// block order.  Exceptions thrown by workers are rethrown here.
template <class Result, class BlockFn>
std::vector<Result> map_blocks(long long total, long long block_size, int threads,
                               BlockFn&& block_fn) {
    if (total < 0 || block_size <= 0) {
        throw std::invalid_argument("map_blocks: total >= 0 and block_size > 0 required");
    }
    const long long n_blocks = (total + block_size - 1) / block_size;
    std::vector<Result> results(static_cast<std::size_t>(n_blocks));
    if (n_blocks == 0) {
        return results;
    }

    const int n_workers = std::min<long long>(resolve_threads(threads), n_blocks);
    std::atomic<long long> next_block{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const long long b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks || failed.load(std::memory_order_relaxed)) {
                return;
            }
            const long long begin = b * block_size;
            const long long end = std::min(total, begin + block_size);
            try {
                results[static_cast<std::size_t>(b)] = block_fn(b, begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return results;
}

}  // namespace critwin
