#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fgmatch {

struct IndexRange {
    int begin = 0;
    int end = 0;
};

/// Split [0, n) into at most `parts` contiguous, near-equal ranges.
inline std::vector<IndexRange> split_range(int n, int parts) {
    parts = std::clamp(parts, 1, std::max(n, 1));
    std::vector<IndexRange> out;
    out.reserve(parts);
    const int base = n / parts;
    const int extra = n % parts;
    int at = 0;
    for (int i = 0; i < parts; ++i) {
        const int len = base + (i < extra ? 1 : 0);
        out.push_back({at, at + len});
        at += len;
    }
    return out;
}

/// Run fn(i) for i in [0, count) on up to `workers` threads. Work is claimed
/// from a shared counter, so callers that write into slot i of a presized
/// vector get results independent of scheduling. The first exception thrown
/// by any task is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t spawn = std::min(threads, count);
        pool.reserve(spawn);
        for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(body);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fgmatch
