#ifndef JIVE_PARALLEL_HPP
#define JIVE_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace jive {

// Runs fn(i) for i in [0, n) across hardware threads. Each index is
// independent; callers that collect results write into a preallocated
// slot per index, so the reduction order is fixed and the outcome does
// not depend on the number of workers.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t max_threads = 0) {
    if (n == 0) return;
    std::size_t hw = max_threads ? max_threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t nthreads = std::min(hw, n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        workers.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += nthreads) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace jive

#endif
