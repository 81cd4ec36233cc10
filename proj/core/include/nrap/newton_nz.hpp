#pragma once

#include <chrono>
#include <cstdint>

#include "nrap/problem.hpp"

namespace nrap {

struct NzConfig {
  double eps = 0.01;  // stop when |sum a_j x_j / b - 1| < eps
  std::int64_t max_iters = 10'000;
  std::chrono::nanoseconds per_start_time_cap = std::chrono::seconds(100);
  std::chrono::nanoseconds total_time_cap = std::chrono::seconds(300);
};

struct NzTrace {
  std::int64_t iterations = 0;
  int restarts = 0;
  double final_relative_residual = 0.0;
  Status status = Status::Failed;
};

// Psi(mu) = b - sum_j a_j x_j(mu); nondecreasing in mu.
double psi(const ProblemInstance& inst, double mu);
// Envelopes that keep only the upper (psi_plus) or only the lower
// (psi_minus) clamps; psi_minus <= psi <= psi_plus.
double psi_plus(const ProblemInstance& inst, double mu);
double psi_minus(const ProblemInstance& inst, double mu);

struct NzStep {
  bool converged = false;
  double mu = 0.0;  // the input mu when converged, the next iterate otherwise
};

// One quasi-Newton step from mu without any bracket history. A zero slope
// falls back to a geometric move towards the root.
NzStep nz_step(const ProblemInstance& inst, double mu, const NzConfig& cfg = {});

struct NzResult {
  Solution solution;
  NzTrace trace;
};

NzResult solve_nz(const ProblemInstance& inst, const NzConfig& cfg = {});

}  // namespace nrap
