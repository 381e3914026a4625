#pragma once

#include <cstddef>
#include <functional>

namespace cq {

/// Number of worker threads used for embarrassingly parallel loops
/// (contour nodes, per-frequency solves, snapshot points). Defaults to 1.
/// Output never depends on this value: every work item writes its own slot.
void set_worker_count(unsigned count);
unsigned worker_count();

/// Runs body(i) for i in [0, n). Falls back to a plain loop when only one
/// worker is configured or `sequential` is set. The first exception thrown
/// by any work item (lowest index wins) is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  bool sequential = false);

}  // namespace cq
