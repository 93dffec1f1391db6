#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gausscap {

/// Worker count: GAUSSCAP_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n). Each index is handled exactly once; results must
/// be written to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

/// Deterministic stream seed for task `stream` under `seed` (splitmix64 mix).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gausscap
