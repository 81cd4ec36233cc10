#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "nrap/problem.hpp"

namespace nrap {

// Median search over the breakpoint multiset with 2-, 3- or 5-set pegging.
enum class BreakpointVariant { MB2, MB3, MB5 };

// Snapshot of one median step, handed to BreakpointOptions::observer. The
// spans are only valid for the duration of the callback.
struct BreakpointIteration {
  std::int64_t iteration = 0;
  double median = 0.0;
  double delta = 0.0;        // clamped resource use of the free variables at the median
  double bk = 0.0;           // reduced resource the median is compared against
  double lower = 0.0;        // dual bracket after this step
  double upper = 0.0;
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
  std::span<const std::size_t> pegged_lower;
  std::span<const std::size_t> pegged_upper;
  std::span<const std::size_t> moved_interior;  // newly known to be strictly inside the bounds
};

struct BreakpointOptions {
  std::function<void(const BreakpointIteration&)> observer;
};

Solution solve_breakpoint(const ProblemInstance& inst, BreakpointVariant variant,
                          const BreakpointOptions& options = {});

// mu solving sum_{j in free} a_j x_j(mu) = bk with every bound dropped.
// Throws std::domain_error if `free` is empty or bk is outside the range the
// family's closed form accepts.
double interior_solve(const ProblemInstance& inst, std::span<const std::size_t> free, double bk);

}  // namespace nrap
