#pragma once

#include <cstddef>
#include <functional>

namespace entbound {

/// Worker count: ENTBOUND_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
unsigned thread_count();

/// Calls body(i) for i in [0, n). Each index is handled exactly once; the
/// first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace entbound
