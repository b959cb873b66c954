#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace localgain {

inline std::size_t default_workers() { return std::max<std::size_t>(1, std::thread::hardware_concurrency()); }

/**
 * Runs fn(k) for k in [0, count) on up to `workers` threads.
 *
 * Each index is handled exactly once; results must be written to per-index
 * slots. If any call throws, the exception from the lowest failing index is
 * rethrown after all threads have joined.
 */
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers == 0 ? default_workers() : workers, 1, std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            try {
                fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
                    try {
                        fn(k);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace localgain
