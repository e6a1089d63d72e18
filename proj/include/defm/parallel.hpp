#pragma once

#include <cstddef>
#include <functional>

namespace defm {

/// Resolves a thread-count request: n > 0 is taken as-is, anything else maps
/// to the hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n).
/// Blocks are claimed dynamically but their boundaries do not depend on the
/// worker count, so per-block results are scheduling-independent.
void parallel_for_blocks(std::size_t n, std::size_t block_size, int threads,
                         const std::function<void(std::size_t, std::size_t,
                                                  std::size_t)>& fn);

/// Pairwise (binary-tree) summation: leaves of up to 8 elements are added in
/// index order, then halves are combined recursively. The reduction tree is a
/// function of n alone, so serial and parallel callers that sum the same
/// per-block partials get bit-identical results.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace defm
