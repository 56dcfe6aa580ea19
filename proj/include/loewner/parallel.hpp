#ifndef LOEWNER_PARALLEL_HPP
#define LOEWNER_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace loewner {

inline std::size_t default_workers() {
    if (const char* env = std::getenv("LOEWNER_WORKERS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

// Runs fn(i) for i in [0, n). Results must be written to index-addressed
// storage so the outcome is independent of scheduling. The first exception
// thrown by a worker is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = default_workers();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    const std::size_t team = std::min(workers, n);
    pool.reserve(team);
    for (std::size_t w = 0; w < team; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace loewner

#endif
