#pragma once

#include <cstddef>
#include <functional>

namespace sketchvos {

/// hardware_concurrency, capped by SKETCHVOS_THREADS when set (>= 1).
int worker_count();

/// Runs fn(0..n-1) over worker_count() threads. The first exception thrown by
/// any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sketchvos
