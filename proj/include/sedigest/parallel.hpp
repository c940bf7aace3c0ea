#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sedigest {

// Runs fn(i) for i in [0, n). With jobs > 1 the range is chunked across
// threads; fn must only touch state owned by index i. The first exception
// thrown by any worker is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (n == 0) return;
    const auto workers = static_cast<std::size_t>(jobs < 1 ? 1 : jobs);
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t used = std::min(workers, n);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(used);
    for (std::size_t t = 0; t < used; ++t) {
        threads.emplace_back([&, t] {
            const std::size_t begin = n * t / used;
            const std::size_t end = n * (t + 1) / used;
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& thread : threads) thread.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sedigest
