#pragma once

#include <cstddef>
#include <functional>

namespace fbns {

/// Worker count from SOLVER_THREADS (default 1, clamped to [1, 64]).
int thread_count();

/// Runs body(i) for i in [0, n) split into contiguous blocks, one per worker.
/// Each index is handled by exactly one call, so results written per index
/// do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fbns
