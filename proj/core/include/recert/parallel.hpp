#pragma once

#include <cstddef>
#include <functional>

namespace recert {

/// Worker count: RECERT_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

}  // namespace recert
