#pragma once

#include <cstddef>
#include <functional>

namespace wulfflab {

/// Worker count: WULFFLAB_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for i in [0, count). Work is split into contiguous blocks,
/// one per worker. The first exception thrown by any block is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wulfflab
