#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nrap/problem.hpp"

namespace nrap {

// Relaxation (variable fixing) algorithms. Letters: P/D = primal or dual
// determination of the relaxed solution; I/E/B = implicit, explicit or
// blended evaluation; digit = number of pegging sets maintained.
enum class RelaxVariant { PIR2, DIR2, DIR3, DIR5, DER2, DER3, DER5, DBR2, DBR3, DBR5 };

enum class Pegging { TwoSets, ThreeSets, FiveSets };

enum class Decision { PegLower, PegUpper, Stop };

// Outcome of evaluating one relaxed solution. `lower`/`upper` are the indices
// whose relaxed value violates or touches the respective bound (L and U).
struct Evaluation {
  std::vector<std::size_t> lower;
  std::vector<std::size_t> upper;
  double beta_l = 0.0;   // sum over L of a_j l_j
  double beta_u = 0.0;   // sum over U of a_j u_j
  double excess = 0.0;   // Delta = sum over U of a_j (xhat_j - u_j)
  double deficit = 0.0;  // nabla = sum over L of a_j (l_j - xhat_j)
  double delta = 0.0;    // clamped resource use of the free variables
  bool has_implicit = false;
  bool has_explicit = false;

  void clear();
};

// Decision table for increasing constraint terms (a_j > 0).
Decision implicit_decision(const Evaluation& ev, double bk);
Decision explicit_decision(const Evaluation& ev, double bk);

// Mutable state of one relaxation solve: the partition of the still-free
// indices, the reduced resource b^k, the dual bracket and the running sums
// that make the relaxed problem O(1) to solve.
class RelaxState {
 public:
  // `with_breakpoints` is false only for primal determination, which never
  // looks at breakpoints. The instance must outlive the state.
  RelaxState(const ProblemInstance& inst, Pegging pegging, bool with_breakpoints = true);
  RelaxState(ProblemInstance&&, Pegging, bool = true) = delete;
  ~RelaxState();
  RelaxState(RelaxState&&) noexcept;
  RelaxState& operator=(RelaxState&&) noexcept;

  // Optimal multiplier of the problem over the free indices with bounds dropped.
  double relaxed_dual() const;
  // Monotone reparametrisation of relaxed_dual() in which the relaxed primal
  // values are cheapest to form; see dual_of_scale.
  double relaxed_scale() const;
  double dual_of_scale(double theta) const;
  // Relaxed primal solution over free_indices(), in that order.
  std::vector<double> relaxed_primal() const;

  // L and U from the dual value (breakpoint comparisons) and beta sums.
  void classify_dual(double mu_hat, Evaluation& ev) const;
  // L, U, excess and deficit from the relaxed primal values at scale theta.
  void classify_primal(double theta, Evaluation& ev) const;
  // Excess and deficit for the sets in `ev`; evaluates xhat only on L and U.
  void implicit_evaluate(double mu_hat, Evaluation& ev) const;
  // delta for the sets in `ev`.
  void explicit_evaluate(double mu_hat, Evaluation& ev) const;

  // Fix L (resp. U) at its bound, shrink b^k, move the bracket end to mu_hat
  // and apply the 3-/5-set transfers.
  void peg_lower(const Evaluation& ev, double mu_hat);
  void peg_upper(const Evaluation& ev, double mu_hat);

  // Write the final values of all free indices: bounds for L and U, the
  // relaxed value at mu for the rest.
  void finish(const Evaluation& ev, double mu);
  // Inequality form only: if mu = 0 already satisfies the constraint, write
  // that solution into x() and return true.
  bool try_zero_dual();

  std::vector<std::size_t> free_indices() const;
  std::size_t free_count() const;
  double bk() const;
  double lower() const;
  double upper() const;
  const std::vector<double>& x() const;
  std::vector<double> take_x();

  // Running sums vs a from-scratch recomputation over the free set; returns
  // the largest relative difference. Test hook.
  double aggregate_drift() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

struct RelaxIteration {
  std::int64_t iteration = 0;
  double mu_hat = 0.0;
  double bk = 0.0;
  double lower = 0.0;  // bracket before this step
  double upper = 0.0;
  std::size_t free_count = 0;
  bool used_explicit = false;
  Decision decision = Decision::Stop;
  const Evaluation* evaluation = nullptr;
  const RelaxState* state = nullptr;
};

struct RelaxOptions {
  std::function<void(const RelaxIteration&)> observer;
  // Compute both the implicit and the explicit evaluation every iteration
  // (the variant's own evaluation still drives the decision).
  bool evaluate_both = false;
};

Solution solve_relaxation(const ProblemInstance& inst, RelaxVariant variant,
                          const RelaxOptions& options = {});

}  // namespace nrap
