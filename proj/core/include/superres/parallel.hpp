#pragma once

#include <cstddef>
#include <functional>

namespace superres {

/// Worker threads to use: SUPERRES_WORKERS if set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for every i in [0, n) on up to `workers` threads (0 means
/// worker_count()). Callers write results by index, so output order never
/// depends on scheduling. If any call throws, the exception from the lowest
/// failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

}  // namespace superres
