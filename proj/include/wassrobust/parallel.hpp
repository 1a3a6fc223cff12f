#pragma once

#include <cstddef>
#include <functional>

namespace wassrobust {

/// Worker thread budget: hardware concurrency, capped by WASSROBUST_THREADS.
std::size_t thread_budget();

/// Runs fn(i) for i in [0, n). Callers write results into per-index slots and
/// reduce in index order afterwards, so the outcome never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace wassrobust
