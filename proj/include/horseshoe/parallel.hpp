#pragma once

#include <cstddef>
#include <functional>

namespace horseshoe {

/// Worker count used by parallel_for. Defaults to the HORSESHOE_THREADS
/// environment variable, else the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Calls f(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so the outcome does not depend on the
/// schedule. The first exception thrown by any f(i) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace horseshoe
