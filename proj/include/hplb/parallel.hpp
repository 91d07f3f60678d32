#pragma once

#include <cstddef>
#include <functional>

namespace hplb {

/// Worker count: hardware concurrency, capped by the HPLB_THREADS environment
/// variable when it holds a positive integer.
int worker_count();

/// Runs body(i) for i in [0, count). Tasks are handed out dynamically, so
/// callers must write results by index. The first exception thrown by any
/// task is rethrown after all workers have stopped.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hplb
