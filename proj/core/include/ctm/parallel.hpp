#pragma once

#include <cstddef>
#include <functional>

namespace ctm {

/// Worker count: METRICS_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count() noexcept;

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// runs exactly once; the first exception thrown is rethrown after all
/// workers join. Callers write results into per-index slots so output does
/// not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ctm
