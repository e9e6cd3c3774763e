#pragma once

#include <functional>

namespace sscope {

/// Runs fn(i) for i in [0, n) across hardware threads with a static block
/// partition. Callers write results into preallocated per-index slots, so the
/// merged output is independent of scheduling. The first exception thrown by
/// any block is rethrown on the calling thread.
void parallel_for(long long n, const std::function<void(long long)>& fn);

}  // namespace sscope
