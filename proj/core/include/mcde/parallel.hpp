#pragma once

#include <cstddef>
#include <functional>

namespace mcde {

//! Caps the number of worker threads used by parallel_for (0 = hardware concurrency).
void set_max_threads(std::size_t n) noexcept;
std::size_t max_threads() noexcept;

//! Runs body(i) for i in [0, n). Each index is visited exactly once; callers write
//! results to index-owned slots so output is independent of the thread count.
//! Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace mcde
