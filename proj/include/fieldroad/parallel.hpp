#pragma once

#include <cstddef>
#include <functional>

namespace fieldroad {

/// Global cap on worker threads. 0 means "use hardware concurrency".
void set_thread_cap(std::size_t n);
std::size_t thread_cap();

/// Runs body(i) for i in [0, n), split into contiguous chunks over at most
/// thread_cap() threads. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fieldroad
