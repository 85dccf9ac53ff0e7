#pragma once

#include <cstddef>
#include <functional>

namespace moire {

/// Resolve a worker count: positive values pass through; 0 reads MOIRE_BANDS_WORKERS, default 1.
int resolve_workers(int requested);

/// Run body(i) for i in [0, count) on up to `workers` threads. Each index is visited exactly
/// once; callers write results into index-addressed slots so output order never depends on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace moire
