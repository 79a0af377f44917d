#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace extlm {

// Worker count: explicit request wins, then EXTLM_THREADS, then
// hardware concurrency.  0 means auto.
inline std::size_t worker_count(std::size_t requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EXTLM_THREADS")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs f(i) for i in [0, n) across the given number of workers.
// Results must be written to per-index slots; iteration order within a
// worker is ascending, so filling an output vector by index keeps the
// overall result identical to a sequential run.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
    if (n == 0) return;
    workers = std::min(workers ? workers : 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace extlm
