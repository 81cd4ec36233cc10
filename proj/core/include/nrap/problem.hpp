#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nrap {

// Objective families. Per-index parameters live in ProblemInstance::p1/p2:
//
//   family              p1      p2      phi_j(x)
//   Quadratic           w       c       w/2 x^2 - c x
//   StratifiedSampling  M_j     rho_j   w_j (M - x) rho_j^2 / ((M - 1) x),  w_j = M_j / M,  M = sum M_j
//   Sampling            c       -       c / x
//   TheoryOfSearch      m       b       m (exp(-b x) - 1)
//   NegativeEntropy     c       -       x (ln(x / c) - 1),  a_j == 1
enum class Family { Quadratic, StratifiedSampling, Sampling, TheoryOfSearch, NegativeEntropy };

enum class Sense { Equality, LessEqual };

enum class Status { Optimal, Approximate, Failed };

inline constexpr Family kAllFamilies[] = {Family::Quadratic, Family::StratifiedSampling,
                                          Family::Sampling, Family::TheoryOfSearch,
                                          Family::NegativeEntropy};

// Short names used by the file formats and the CLI: quadratic, stratified,
// sampling, search, negentropy.
std::string_view to_string(Family family);
std::string_view to_string(Sense sense);
std::string_view to_string(Status status);
Family parse_family(std::string_view name);
Sense parse_sense(std::string_view name);
Status parse_status(std::string_view name);

// True for the families whose interior map x_j(mu) is only defined for mu > 0.
bool requires_positive_dual(Family family);

// minimize sum_j phi_j(x_j)  s.t.  sum_j a_j x_j (= or <=) b,  l_j <= x_j <= u_j.
struct ProblemInstance {
  Family family = Family::Quadratic;
  Sense sense = Sense::Equality;
  double b = 0.0;
  std::vector<double> a;
  std::vector<double> p1;
  std::vector<double> p2;  // empty for single-parameter families
  std::vector<double> l;
  std::vector<double> u;

  std::size_t size() const { return a.size(); }
  bool operator==(const ProblemInstance&) const = default;
};

// Throws std::invalid_argument describing the first violated invariant
// (shapes, l < u, a > 0, family positivity, feasibility of b).
void validate(const ProblemInstance& inst);

// Dual values at which x_j(mu) reaches its lower (mu_l) and upper (mu_u) bound.
// mu_u[j] <= mu_l[j]; mu_l is +inf for Sampling-type terms with l_j == 0.
struct Breakpoints {
  std::vector<double> mu_l;
  std::vector<double> mu_u;
};

struct KktReport {
  double feasibility_residual = 0.0;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  double sign_violation = 0.0;
  double max_residual = 0.0;

  bool passes(double tol) const { return max_residual <= tol; }
};

struct Solution {
  std::vector<double> x;
  double mu = 0.0;
  Status status = Status::Failed;
  std::int64_t iterations = 0;
  std::chrono::nanoseconds elapsed{0};
};

// phi_j'(x) for index j.
double derivative(const ProblemInstance& inst, std::size_t j, double x);

// Clamped minimizer of phi_j(x) + mu a_j x over [l_j, u_j]. Throws
// std::domain_error when the interior formula is needed at a mu outside the
// family's dual domain, which only happens for inconsistent instances.
double primal_from_dual(const ProblemInstance& inst, double mu, std::size_t j);

// primal_from_dual for every index.
std::vector<double> primal_vector(const ProblemInstance& inst, double mu);

Breakpoints compute_breakpoints(const ProblemInstance& inst);

// Width of the band around a bound inside which kkt_residual treats x_j as
// sitting on that bound, relative to u_j - l_j.
inline constexpr double kBoundaryWidth = 1e-12;

KktReport kkt_residual(const ProblemInstance& inst, std::span<const double> x, double mu);

// sum_j phi_j(x_j). Throws std::domain_error on x_j <= 0 for the families
// defined on the positive half-line.
double eval_objective(const ProblemInstance& inst, std::span<const double> x);

// sum_j a_j x_j
double resource_usage(const ProblemInstance& inst, std::span<const double> x);

}  // namespace nrap
