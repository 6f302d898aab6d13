#ifndef RMGEN_PARALLEL_HPP
#define RMGEN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace rmgen {

/// Number of workers for a `jobs` request; 0 means hardware concurrency.
unsigned resolve_jobs(unsigned jobs);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must write
/// disjoint outputs. If any item throws, the exception of the lowest failing
/// index that ran is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace rmgen

#endif  // RMGEN_PARALLEL_HPP
