#pragma once

#include <cstddef>
#include <functional>

namespace spherefield {

// Worker count from SPHEREFIELD_WORKERS (default 1, clamped to >= 1).
int worker_count();

// Calls body(i) for i in [0, n), split into contiguous chunks over
// worker_count() threads. Bodies must write only to slots owned by i, so
// results do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spherefield
