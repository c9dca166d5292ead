#pragma once

#include <cstddef>
#include <functional>

namespace condasian {

// Number of workers for a request of `threads` (0 = hardware concurrency).
unsigned resolve_threads(int threads);

// Runs fn(i) for i in [0, n) on a fixed pool. Each index is written by exactly one
// call, so results stored by index do not depend on the worker count. The first
// exception (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace condasian
