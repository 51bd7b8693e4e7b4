#pragma once

#include <cstdint>
#include <functional>

namespace gvslam {

/// Caps the worker count used by parallel_for (0 = hardware concurrency).
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
/// not depend on the worker count, so chunked reductions stay deterministic
/// under any --threads setting. Writes must be disjoint across chunks.
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn,
                  int64_t min_chunk = 1024);

/// Runs fn(i) for i in [0, num_tasks) across the worker pool. Callers that
/// reduce should accumulate into per-task slots and combine in task order.
void parallel_for_tasks(int64_t num_tasks, const std::function<void(int64_t)>& fn);

}  // namespace gvslam
