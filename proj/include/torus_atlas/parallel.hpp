#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace torus_atlas {

// Worker count used when a call passes jobs = 0.
int default_jobs();
void set_default_jobs(int jobs);
inline int resolve_jobs(int jobs) { return jobs > 0 ? jobs : default_jobs(); }

// Runs f(i) for i in [0, n). Callers write results into slot i, so the
// merged output never depends on scheduling. If several indices throw, the
// exception of the smallest index is rethrown.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::size_t bad_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr bad;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (i < bad_index) {
                    bad_index = i;
                    bad = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (bad) std::rethrow_exception(bad);
}

}  // namespace torus_atlas
