#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ohmnet {

enum class ExecutionMode { sequential, parallel };

inline std::size_t resolve_threads(ExecutionMode mode, std::size_t requested) {
    if (mode == ExecutionMode::sequential) return 1;
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// fn(begin, end, worker). Runs inline when threads <= 1. The first
/// exception thrown by any worker is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads <= 1) {
        if (n > 0) fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        const auto chunk = (n + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            const auto begin = w * chunk;
            const auto end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end, w] {
                try {
                    fn(begin, end, w);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace ohmnet
