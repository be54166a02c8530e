#pragma once

#include <cstddef>
#include <functional>

namespace molspec {

/// Number of worker threads used when a caller passes threads <= 0.
int default_thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks on up to `threads` threads.
/// Results must not depend on scheduling; each index is processed exactly once.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace molspec
