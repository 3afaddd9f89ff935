#pragma once

#include <cstddef>
#include <functional>

namespace linbp {

// Runs fn(0), ..., fn(count-1) across a small thread pool. Each index owns
// its output slot, so results are deterministic regardless of schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace linbp
