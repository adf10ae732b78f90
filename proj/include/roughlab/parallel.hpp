#pragma once

#include <cstddef>
#include <functional>

namespace roughlab {

// 0 means std::thread::hardware_concurrency().
std::size_t resolve_workers(std::size_t requested);

// Runs fn(begin, end) over consecutive blocks of [0, count). Blocks are claimed
// dynamically; fn must write only to per-index storage so the outcome does not
// depend on the worker count. The first exception thrown by fn is rethrown.
void parallel_blocks(std::size_t count, std::size_t block, std::size_t workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace roughlab
