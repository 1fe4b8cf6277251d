#pragma once

#include <functional>
#include <vector>

namespace holelab {

/// Worker count: LAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(chunk, begin, end) over [0, n) split into `chunks` contiguous
/// ranges. Chunk boundaries depend only on n and chunks, never on the
/// number of threads, so per-chunk results merged in chunk order are
/// identical for every thread count.
void parallel_chunks(int n, int chunks, const std::function<void(int, int, int)>& body);

/// Default chunk count for n items.
int default_chunks(int n);

}  // namespace holelab
