#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cogmac {

// Resolve a --jobs value: 0 means "all hardware threads", otherwise as given.
inline int effective_jobs(int jobs) {
    if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
#ifdef _OPENMP
    return jobs == 0 ? omp_get_max_threads() : jobs;
#else
    return jobs == 0 ? 1 : jobs;
#endif
}

// Run f(i) for i in [0, n). jobs == 1 is the serial reference path; any other
// value uses OpenMP when available. Callers must write results by index so the
// outcome is identical regardless of scheduling.
template <typename F>
void parallel_for_index(std::size_t n, int jobs, F&& f) {
    const int threads = effective_jobs(jobs);
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
#else
    for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

} // namespace cogmac
