#pragma once

#include <cstddef>
#include <functional>

namespace tropskel {

// Worker count: TROPSKEL_THREADS if set and positive, else the hardware count.
int thread_count();

// Calls body(i) for i in [0, n) across thread_count() workers. Results must be
// written to per-index slots; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tropskel
