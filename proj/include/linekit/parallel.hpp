#pragma once

#include <cstddef>
#include <functional>

namespace linekit {

/// Worker count: LINEKIT_THREADS if set to a positive integer, else the hardware concurrency.
std::size_t thread_count();

/// Runs fn(i) for i in [0, n) across up to thread_count() threads, in contiguous
/// blocks. The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace linekit
