#pragma once

#include <cstddef>
#include <functional>

namespace ctrect {

// Worker count: RECTIFY_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Calls fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written by index; the first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace ctrect
