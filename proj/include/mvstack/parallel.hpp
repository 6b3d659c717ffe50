#pragma once

#include <cstddef>
#include <functional>

namespace mvstack {

// Worker cap: MVSTACK_THREADS environment variable, 0 or unset means
// hardware concurrency.
int thread_budget();

// Runs fn(0..count-1). With enabled=false (or a budget of one) the loop is
// plain sequential. Jobs must write to disjoint slots; the first exception
// thrown by any job is rethrown after all workers join. Results are required
// to be identical to the sequential order, which holds as long as jobs do not
// share mutable state.
void parallel_for(std::size_t count, bool enabled,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mvstack
