#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qrlock {

/// Run f(i) for i in [0, n) on up to `threads` workers.
///
/// Work is split into fixed contiguous chunks, so the set of calls (and any
/// per-index RNG substreams) is identical for every thread count. Callers must
/// write only to per-index slots. First exception is rethrown on the caller.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
    if (n == 0) return;
    std::size_t workers = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
    if (workers > n) workers = n;
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        try {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qrlock
