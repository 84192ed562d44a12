#pragma once

#include <functional>

namespace frechet {

/// Worker count: hardware concurrency capped by the FRECHET_RISK_THREADS
/// environment variable (1 disables threading).
int worker_count();

/// Runs body(i) for i in [0, n) across workers. Callers own determinism:
/// write results into pre-allocated slot i only.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace frechet
