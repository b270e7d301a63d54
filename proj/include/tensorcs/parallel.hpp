// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tensorcs {

/// Worker count for a request of `requested` threads (0 = hardware
/// concurrency), capped by the TENSORCS_THREADS environment variable.
[[nodiscard]] std::size_t resolve_threads(std::size_t requested = 0);

/// Evaluates fn(0..count-1) on up to `threads` workers and returns the results
/// by index, so the outcome does not depend on scheduling. If any call throws,
/// the exception of the lowest failing index is rethrown after all workers
/// have stopped.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn&& fn, std::size_t threads = 0) {
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min(resolve_threads(threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        auto body = [&] {
            for (std::size_t i = next++; i < count && !failed.load(); i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                    failed = true;
                }
            }
        };
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
        body();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace tensorcs
