#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nsais {

// Worker count used by the solvers; 1 unless set (the CLI sets it from
// --jobs or NONSTOCH_AIS_JOBS).
unsigned default_jobs();
void set_default_jobs(unsigned jobs);

// Calls f(i) for i in [0, n) on up to `jobs` threads in contiguous chunks.
// The first exception thrown by a worker is rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
    if (jobs <= 1 || n < 2 * static_cast<std::size_t>(jobs)) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (unsigned k = 0; k < jobs; ++k) {
        const std::size_t lo = k * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, k, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace nsais
