#pragma once

#include <cstddef>
#include <functional>

namespace fkwc {

/// Process-wide worker count used by parallel_for (default: hardware threads).
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks; callers
/// must write results only to slot i so output never depends on scheduling.
/// Nested calls from inside a worker run serially. The first exception thrown
/// by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fkwc
