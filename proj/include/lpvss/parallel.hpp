#pragma once

#include <cstddef>
#include <functional>

namespace lpvss {

// Worker cap: LPV_SSID_THREADS when set (clamped to at least 1), otherwise
// the hardware concurrency.
std::size_t worker_count();

// Runs fn(0..count-1) on up to worker_count() threads in contiguous chunks.
// Callers own determinism: workers write only to per-index slots and any
// reduction happens afterwards in index order on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lpvss
