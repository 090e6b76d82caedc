#pragma once

#include <cstddef>
#include <functional>

namespace ergolab {

// Worker count resolution: explicit argument > ERGOLAB_WORKERS > hardware.
int default_workers();
int resolve_workers(int requested);

// Runs fn(0..n-1) on up to `workers` threads. Tasks are handed out through a
// shared counter; each task writes only its own output slot, so results do
// not depend on the schedule or the worker count. Exceptions are captured
// and rethrown on the calling thread.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ergolab
