#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qread {

inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

// Runs fn(0..n-1) across up to `jobs` workers. Tasks must be independent and
// write only their own slots; results are then order-independent.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    const size_t nw = std::min(size_t(jobs), n);
    workers.reserve(nw);
    for (size_t w = 0; w < nw; ++w)
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : workers) t.join();
}

}  // namespace qread
