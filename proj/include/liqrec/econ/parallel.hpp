#pragma once

#include <cstddef>
#include <functional>

namespace liqrec::econ {

// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
// Callers write into index-addressed slots, so results do not depend on
// scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace liqrec::econ
