#pragma once

#include <cstddef>
#include <functional>

namespace mcam {

/// Worker count resolution: explicit argument > MCAM_WORKERS env var >
/// hardware concurrency. Always at least 1.
int resolve_worker_count(int requested = 0);

/// Runs fn(i) for i in [0, count) across a pool of threads. Each index is
/// processed exactly once; callers get deterministic results by writing to
/// disjoint, preallocated slots. The first exception thrown by any worker is
/// rethrown on the calling thread after all workers joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  int workers = 0);

}  // namespace mcam
