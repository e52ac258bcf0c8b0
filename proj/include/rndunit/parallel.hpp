#pragma once

#include <cstddef>
#include <functional>

namespace rndunit {

/// Worker cap: RNDUNIT_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for i in [0, n), spreading contiguous chunks over up to
/// thread_count() threads. Callers write into per-index slots and reduce in
/// index order afterwards, so results do not depend on scheduling.
/// Runs inline when `work_per_item * n` is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  double work_per_item = 1.0);

}  // namespace rndunit
