#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace locdep {

// Deterministic replicate-parallel execution.  Work is cut into fixed-size
// blocks (independent of the worker count); each block produces one partial
// result, and partials are combined by pairwise tree reduction in block
// order.  Floating-point results are therefore bit-identical for any number
// of threads.

inline constexpr std::size_t kReplicateBlock = 1024;

template <class Partial, class BlockFn>
std::vector<Partial> map_blocks(std::size_t n_items, int threads, BlockFn&& fn,
                                std::size_t block_size = kReplicateBlock) {
    const std::size_t n_blocks = n_items == 0 ? 0 : (n_items + block_size - 1) / block_size;
    std::vector<Partial> partials(n_blocks);
    if (n_blocks == 0) return partials;
    if (threads < 1) threads = 1;

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::size_t lo = b * block_size;
            const std::size_t hi = std::min(n_items, lo + block_size);
            partials[b] = fn(lo, hi);
        }
    };

    if (threads == 1 || n_blocks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int use = static_cast<int>(std::min<std::size_t>(threads, n_blocks));
        pool.reserve(use);
        for (int t = 0; t < use; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return partials;
}

template <class T, class Merge>
T tree_reduce(std::span<T> items, Merge&& merge) {
    // Fixed-shape binary tree over the block index range.
    struct Rec {
        std::span<T> items;
        Merge& merge;
        T run(std::size_t lo, std::size_t hi) {
            if (hi - lo == 1) return std::move(items[lo]);
            const std::size_t mid = lo + (hi - lo) / 2;
            T left = run(lo, mid);
            T right = run(mid, hi);
            return merge(std::move(left), std::move(right));
        }
    };
    Rec rec{items, merge};
    return rec.run(0, items.size());
}

template <class Partial, class BlockFn, class Merge>
Partial parallel_reduce(std::size_t n_items, int threads, BlockFn&& fn, Merge&& merge,
                        Partial empty, std::size_t block_size = kReplicateBlock) {
    auto partials = map_blocks<Partial>(n_items, threads, fn, block_size);
    if (partials.empty()) return empty;
    return tree_reduce(std::span<Partial>(partials), merge);
}

}  // namespace locdep
