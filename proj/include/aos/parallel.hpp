#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace aos {

/// Worker-count resolution: 0 means one thread per hardware core.
inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(chunk_begin, chunk_end) over a static partition of [begin, end).
/// Chunks are disjoint, so output written per-index is independent of the
/// worker count. Exceptions from workers are rethrown on the caller.
inline void parallel_for_chunks(int begin, int end, int workers,
                                const std::function<void(int, int)>& fn) {
    const int n = end - begin;
    if (n <= 0) return;
    workers = std::min(resolve_workers(workers), n);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + static_cast<int>(static_cast<long long>(n) * w / workers);
        const int hi = begin + static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        threads.emplace_back([&fn, &errors, w, lo, hi] {
            try {
                if (lo < hi) fn(lo, hi);
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace aos
