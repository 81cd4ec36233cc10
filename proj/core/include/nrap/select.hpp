#pragma once

#include <span>

namespace nrap {

// Lower median (element ceil(n/2)-1 of the sorted order) by quickselect with
// median-of-three pivoting, expected linear time. Permutes `values`.
// Throws std::invalid_argument on empty input.
double quickselect_median(std::span<double> values);

// k-th smallest element (0-based), same algorithm.
double quickselect(std::span<double> values, std::size_t k);

}  // namespace nrap
