#pragma once

#include <cstddef>
#include <functional>

namespace degenflux {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(i) for i in [0, n) over thread_count() workers in contiguous
/// chunks. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace degenflux
