// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pgt {

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Work is handed out one index at a time. The first exception
/// stops the pool and is rethrown on the calling thread.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t pool_size =
        std::min<std::size_t>(n, workers > 0 ? static_cast<std::size_t>(workers) : hw);
    if (pool_size <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(pool_size);
        for (std::size_t t = 0; t < pool_size; ++t)
            threads.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        next = n;
                    }
                }
            });
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pgt
