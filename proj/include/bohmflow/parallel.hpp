#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bohmflow {

/// Number of worker threads for ensemble work. Results never depend on it.
struct Parallelism {
    unsigned threads = 1;

    /// Honors BOHMFLOW_THREADS as a cap on the hardware concurrency.
    static Parallelism from_environment() {
        unsigned n = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("BOHMFLOW_THREADS")) {
            try {
                const long cap = std::stol(env);
                if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
            } catch (const std::exception&) {
                // unparsable cap: ignore
            }
        }
        return {n};
    }
};

/// Calls fn(i) for i in [0, count). Items are split into contiguous blocks;
/// fn must only write state owned by index i. The first exception thrown by
/// any worker is rethrown on the caller's thread.
template <class Fn>
void parallel_for(std::size_t count, Parallelism par, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, par.threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * block, end = std::min(count, begin + block);
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace bohmflow
