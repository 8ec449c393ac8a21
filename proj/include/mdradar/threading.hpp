#pragma once

#include <cstddef>
#include <functional>

namespace mdradar {

/// Number of workers parallel_for may use: hardware_concurrency, capped by the
/// MDS_RADAR_THREADS environment variable when set (>=1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Work is split into contiguous static blocks,
/// so results written to per-index slots are identical for any worker count.
/// Nested calls run serially on the calling worker. Exceptions propagate.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mdradar
