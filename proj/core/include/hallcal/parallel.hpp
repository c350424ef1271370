#pragma once

#include <cstddef>
#include <functional>

namespace hallcal {

/// Number of workers to use when the caller asks for `requested` (0 = hardware concurrency).
int resolve_workers(int requested);

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Each index runs
/// exactly once; the first exception thrown by any call is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace hallcal
