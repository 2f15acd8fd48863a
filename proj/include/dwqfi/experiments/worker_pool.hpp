#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dwqfi::experiments {

/**
 * Runs fn(i) for i in [0, count) on at most `workers` threads. Each index is
 * claimed exactly once; callers write results into slot i, so the gathered
 * output does not depend on scheduling. If any call throws, the exception of
 * the lowest failing index is rethrown after all threads finish.
 */
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto drain = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            if (failed.load(std::memory_order_relaxed))
                return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count <= 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::min(threads, count));
        for (std::size_t t = 0; t < std::min(threads, count); ++t)
            pool.emplace_back(drain);
    }

    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace dwqfi::experiments
