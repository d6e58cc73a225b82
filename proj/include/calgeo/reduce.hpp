#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace calgeo {

/// Pairwise (tree) summation. Fixed association order, so reductions are
/// bitwise deterministic regardless of thread count: parallel kernels fill a
/// per-node term buffer and the final sum is always taken here, serially.
double pairwise_sum(std::span<const double> terms);

inline double pairwise_sum(const std::vector<double>& terms) {
    return pairwise_sum(std::span<const double>(terms));
}

} // namespace calgeo
