#pragma once

#include <functional>

namespace halfflow {

// Worker count from HALFFLOW_THREADS (default 1), read once per process.
int worker_count();

// Runs fn(begin, end) over a contiguous partition of [0, count) across
// the configured workers.  Each index is handled by exactly one worker
// and per-index results must be written to disjoint locations, so the
// output is identical for every worker count.  Reductions must collect
// per-index partials and combine them in index order afterwards.
void parallel_for(int count, const std::function<void(int, int)>& fn);

} // namespace halfflow
