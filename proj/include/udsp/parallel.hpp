#pragma once

#include <cstddef>
#include <functional>

namespace udsp {

// Worker count: UNBOUNDED_DSP_THREADS if set and positive, otherwise
// hardware concurrency. 0 means auto.
[[nodiscard]] auto thread_count() -> unsigned;

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is handled
// by exactly one worker, so results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace udsp
