#pragma once

#include <cstddef>
#include <functional>

namespace ou {

/// Thread count used by parallel_for: min(hardware, OU_INVERSE_THREADS).
int worker_count();

/// Runs body(i) for i in [0, count) across worker threads. Each index owns
/// its outputs, so results are bitwise independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ou
