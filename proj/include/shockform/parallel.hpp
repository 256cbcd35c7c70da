#pragma once

#include <cstddef>
#include <functional>

namespace shock {

/// Upper bound on worker threads for parallel_for; 0 means hardware count.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(begin, end) over static contiguous chunks of [0, n). Chunks
/// write disjoint data, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1024);

}  // namespace shock
