#pragma once

#include <cstddef>
#include <functional>

namespace furstlab {

// Process-wide worker count used by the parallel helpers. Defaults to 1.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls fn(i) for i in [0, n). Work is split into contiguous blocks; fn must
// only write to per-index state so results do not depend on the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Sums values[0..n) in a fixed pairwise order.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace furstlab
