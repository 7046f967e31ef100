#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "common.hpp"

namespace anisolevy {

// Worker count resolution: explicit request wins, then the ANISOLEVY_WORKERS
// environment variable, then hardware concurrency. Always at least 1.
inline std::size_t resolve_workers(std::size_t requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ANISOLEVY_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        require(end != env && *end == '\0' && v >= 1, errc::config,
                "ANISOLEVY_WORKERS must be a positive integer, got '" + std::string(env) + "'");
        return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Run fn(0), ..., fn(n_batches - 1) across `workers` threads. Batches are
// claimed from an atomic counter, so which thread runs which batch is timing
// dependent — fn must therefore write only into per-batch state (the caller
// reduces in batch order afterwards). That discipline is what makes results
// independent of the worker count. The first exception wins; remaining
// workers drain quickly via the stop flag.
template <typename Fn>
void parallel_batches(std::size_t n_batches, std::size_t workers, Fn&& fn) {
    if (n_batches == 0) return;
    workers = std::min(std::max<std::size_t>(workers, 1), n_batches);

    if (workers == 1) {
        for (std::size_t b = 0; b < n_batches; ++b) fn(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&]() {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_batches) return;
            try {
                fn(b);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace anisolevy
