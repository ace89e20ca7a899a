#pragma once

#include <functional>

namespace hwsim {

/// Runs fn(i) for i = 0..n-1 on up to n_workers threads (inline when
/// n_workers <= 1). The assignment of tasks to threads is unspecified, so fn
/// must write only to per-index state; the first exception thrown is rethrown.
void parallel_for(int n, int n_workers, const std::function<void(int)>& fn);

/// 0 picks the hardware concurrency; anything else is clamped to >= 1.
int resolve_workers(int requested);

}  // namespace hwsim
