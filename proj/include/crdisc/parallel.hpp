#pragma once

#include <functional>

namespace crd {

/// Worker count from CRDISC_WORKERS, else the hardware concurrency (at least 1).
int worker_count();

/// Runs f(0..n-1) on the worker pool. Results must go to index-addressed slots;
/// the first exception by index is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace crd
