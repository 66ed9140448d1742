#pragma once

#include <functional>

namespace agglm {

/// Runs body(0..count-1) on up to `jobs` threads. Iterations must be
/// independent; callers keep determinism by writing results into
/// index-addressed slots. The first exception thrown by any iteration is
/// rethrown after all threads join.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace agglm
