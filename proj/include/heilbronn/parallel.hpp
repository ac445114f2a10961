#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace heilbronn {

// HEILBRONN_THREADS caps the worker count (default: hardware concurrency).
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* s = std::getenv("HEILBRONN_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Calls fn(begin, end, worker) on contiguous blocks of [0, n). Block layout
// depends only on n and the worker count; callers that write per-index
// results get identical output for any thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned t = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (t <= 1) {
        fn(std::size_t{0}, n, 0u);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + t - 1) / t;
    for (unsigned k = 0; k < t; ++k) {
        std::size_t b = k * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e, k] { fn(b, e, k); });
    }
    for (auto& th : pool) th.join();
}

// Sum in a fixed binary tree order, independent of how values were produced.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace heilbronn
