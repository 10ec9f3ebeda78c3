#pragma once

#include <cstdint>
#include <functional>

namespace cife {

// Process-wide worker pool. Work items write to disjoint index ranges, so
// results are identical for any thread count.
int pool_threads();
void set_pool_threads(int n);

// Splits [0, n) into contiguous chunks and runs fn(lo, hi) on the pool.
// Runs inline when n is small or the pool has a single thread.
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

}  // namespace cife
