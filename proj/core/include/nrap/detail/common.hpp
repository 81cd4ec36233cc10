#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "nrap/detail/kernels.hpp"
#include "nrap/problem.hpp"

namespace nrap::detail {

// Relative width of the "resource use equals b^k" band for both the explicit
// (delta vs b^k) and implicit (excess vs deficit) tests.
inline constexpr double kResourceTolerance = 1e-12;

inline double resource_band(double bk) { return kResourceTolerance * std::max(1.0, std::abs(bk)); }

// Where an index currently lives while a solver runs.
enum class Region : unsigned char { Free, BelowUpper, AboveLower, Interior, Pegged };

// A dual value inside [lower, upper], used when every variable got pegged and
// mu is therefore only known up to that interval.
inline double bracket_point(double lower, double upper) {
  const bool lo = std::isfinite(lower);
  const bool hi = std::isfinite(upper);
  if (lo && hi) return 0.5 * (lower + upper);
  if (lo) return lower;
  if (hi) return upper;
  return 0.0;
}

// mu = 0 test for the inequality form; fills x and returns true when the
// unconstrained-resource minimizer already fits.
template <class K>
bool zero_dual_fits(const ProblemInstance& inst, const Terms& t, std::vector<double>& x) {
  double used = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double mu_l = breakpoint_at<K>(t, j, t.l[j]);
    const double mu_u = breakpoint_at<K>(t, j, t.u[j]);
    x[j] = clamped<K>(t, j, 0.0, mu_l, mu_u);
    used += t.a[j] * x[j];
  }
  return used <= inst.b + resource_band(inst.b);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::chrono::nanoseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                start_);
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace nrap::detail
