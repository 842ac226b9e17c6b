#pragma once
// Index-range parallelism with deterministic chunking. Worker count comes from
// WALKLAB_THREADS (default: hardware concurrency).

#include <cstdlib>
#include <functional>
#include <thread>

#include "core.hpp"

namespace walklab {

inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("WALKLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    return hw;
}

// Calls fn(chunk, begin, end) over a fixed partition of [0, n). The partition
// depends only on n and the chunk count, so per-chunk results can be merged in
// chunk order for bitwise-reproducible output.
inline void parallel_chunks(long long n, int chunks, const std::function<void(int, long long, long long)>& fn) {
    if (n <= 0) return;
    chunks = static_cast<int>(std::max<long long>(1, std::min<long long>(chunks, n)));
    const int workers = std::min(chunks, worker_count());
    auto bounds = [&](int c) { return std::make_pair(n * c / chunks, n * (c + 1) / chunks); };
    if (workers <= 1) {
        for (int c = 0; c < chunks; ++c) {
            auto [b, e] = bounds(c);
            fn(c, b, e);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int c = w; c < chunks; c += workers) {
                auto [b, e] = bounds(c);
                fn(c, b, e);
            }
        });
    for (auto& t : pool) t.join();
}

inline void parallel_for(long long n, const std::function<void(long long)>& fn) {
    parallel_chunks(n, 64, [&](int, long long b, long long e) {
        for (long long i = b; i < e; ++i) fn(i);
    });
}

}  // namespace walklab
