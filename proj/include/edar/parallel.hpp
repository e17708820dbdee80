#pragma once

#include <functional>

namespace edar {

// Worker count for internal parallelism. Reads EDAR_THREADS once; defaults to
// the hardware concurrency. Always >= 1.
int thread_count();

// Runs fn(i) for i in [0,n). Work is split into contiguous index ranges, one
// per worker, so each index is computed exactly once by one thread. Callers
// must only write outputs owned by index i; under that contract results are
// bit-identical to the serial loop.
void parallel_for(long long n, const std::function<void(long long)>& fn);

}  // namespace edar
