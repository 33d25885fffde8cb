// parallel.hpp -- deterministic block-parallel loops.
//
// Work is split into fixed blocks; workers own disjoint blocks and any
// reduction combines per-block results in block order. Output is therefore
// independent of the number of threads.

#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace randeq {

inline int effective_threads(int requested) {
    if (requested <= 0) return 1;
    unsigned hw = std::thread::hardware_concurrency();
    return std::min<int>(requested, hw == 0 ? 1 : static_cast<int>(hw));
}

// fn(begin, end) over [0,n) split into contiguous ranges, one per worker.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = effective_threads(threads);
    if (threads <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t nt = std::min<std::size_t>(threads, n);
    std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace randeq
