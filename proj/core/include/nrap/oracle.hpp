#pragma once

#include <span>

#include "nrap/problem.hpp"

namespace nrap {

struct OracleConfig {
  double mu_tol = 1e-13;  // bracket width, relative to max(1, |mu|)
  int max_iter = 200;
};

// Reference solver: bisection on the monotone map mu -> sum_j a_j x_j(mu),
// followed by a closed-form re-solve over the variables found strictly
// inside their bounds. Evaluates the family formulas directly from the
// instance parameters and shares no code with the other solvers.
Solution bisection_solve(const ProblemInstance& inst, const OracleConfig& cfg = {});

KktReport verify(const ProblemInstance& inst, const Solution& sol);

// Number of variables strictly inside their bounds, using the same boundary
// width as kkt_residual.
std::size_t interior_count(const ProblemInstance& inst, std::span<const double> x);

}  // namespace nrap
