#include "nrap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nrap/detail/common.hpp"
#include "nrap/detail/sum.hpp"

namespace nrap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The family formulas, written out from the objective definitions.
class Formulas {
 public:
  explicit Formulas(const ProblemInstance& inst) : inst_(inst) {
    if (inst.family == Family::StratifiedSampling) {
      population_ = std::accumulate(inst.p1.begin(), inst.p1.end(), 0.0);
    }
  }

  bool positive_dual() const {
    return inst_.family == Family::StratifiedSampling || inst_.family == Family::Sampling ||
           inst_.family == Family::TheoryOfSearch;
  }

  double phi_prime(std::size_t j, double x) const {
    const auto& p = inst_.p1;
    const auto& q = inst_.p2;
    switch (inst_.family) {
      case Family::Quadratic: return p[j] * x - q[j];
      case Family::StratifiedSampling: return -numerator(j) / (x * x);
      case Family::Sampling: return -p[j] / (x * x);
      case Family::TheoryOfSearch: return -p[j] * q[j] * std::exp(-q[j] * x);
      case Family::NegativeEntropy: return std::log(x / p[j]);
    }
    return 0.0;
  }

  // Root of phi'_j(x) + mu a_j = 0 with the bounds ignored.
  double unclamped(std::size_t j, double mu) const {
    const double a = inst_.a[j];
    const auto& p = inst_.p1;
    const auto& q = inst_.p2;
    switch (inst_.family) {
      case Family::Quadratic: return (q[j] - mu * a) / p[j];
      case Family::StratifiedSampling: return std::sqrt(numerator(j) / (a * mu));
      case Family::Sampling: return std::sqrt(p[j] / (a * mu));
      case Family::TheoryOfSearch: return std::log(p[j] * q[j] / (a * mu)) / q[j];
      case Family::NegativeEntropy: return p[j] * std::exp(-a * mu);
    }
    return 0.0;
  }

  double x(std::size_t j, double mu) const {
    return std::clamp(unclamped(j, mu), inst_.l[j], inst_.u[j]);
  }

  // mu solving sum_{free} a_j unclamped(j, mu) = bk.
  double solve_free(std::span<const std::size_t> free, double bk) const {
    const auto& a = inst_.a;
    const auto& p = inst_.p1;
    const auto& q = inst_.p2;
    detail::NeumaierSum s1, s2;
    switch (inst_.family) {
      case Family::Quadratic:
        for (std::size_t j : free) {
          s1.add(a[j] * q[j] / p[j]);
          s2.add(a[j] * a[j] / p[j]);
        }
        return (s1.value() - bk) / s2.value();
      case Family::StratifiedSampling:
      case Family::Sampling:
        if (!(bk > 0.0)) return kInf;
        for (std::size_t j : free) {
          const double num = inst_.family == Family::Sampling ? p[j] : numerator(j);
          s1.add(std::sqrt(a[j] * num));
        }
        return (s1.value() / bk) * (s1.value() / bk);
      case Family::TheoryOfSearch:
        for (std::size_t j : free) {
          s1.add(a[j] / q[j] * std::log(p[j] * q[j] / a[j]));
          s2.add(a[j] / q[j]);
        }
        return std::exp((s1.value() - bk) / s2.value());
      case Family::NegativeEntropy:
        if (!(bk > 0.0)) return kInf;
        for (std::size_t j : free) s1.add(p[j]);
        return std::log(s1.value() / bk);
    }
    return kInf;
  }

 private:
  double numerator(std::size_t j) const {
    const double rho = inst_.p2[j];
    return inst_.p1[j] * rho * rho / (population_ - 1.0);
  }

  const ProblemInstance& inst_;
  double population_ = 0.0;
};

struct Usage {
  double value;
  double magnitude;
};

Usage usage(const ProblemInstance& inst, const Formulas& f, double mu) {
  detail::NeumaierSum sum;
  double mag = 0.0;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    const double v = inst.a[j] * f.x(j, mu);
    sum.add(v);
    mag += std::abs(v);
  }
  return {sum.value(), mag};
}

enum class Side : signed char { Lower = -1, Inside = 0, Upper = 1 };

Side side(const ProblemInstance& inst, const Formulas& f, std::size_t j, double mu) {
  const double v = f.unclamped(j, mu);
  if (v <= inst.l[j]) return Side::Lower;
  if (v >= inst.u[j]) return Side::Upper;
  return Side::Inside;
}

// Replace the bisection midpoint by the exact solution of the reduced problem
// when that does not change which variables sit at a bound.
double polish(const ProblemInstance& inst, const Formulas& f, double mu) {
  std::vector<std::size_t> free;
  std::vector<Side> sides(inst.size());
  detail::NeumaierSum pegged;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    sides[j] = side(inst, f, j, mu);
    if (sides[j] == Side::Inside) {
      free.push_back(j);
    } else {
      pegged.add(inst.a[j] * (sides[j] == Side::Lower ? inst.l[j] : inst.u[j]));
    }
  }
  if (free.empty()) return mu;
  const double exact = f.solve_free(free, inst.b - pegged.value());
  if (!std::isfinite(exact) || (f.positive_dual() && !(exact > 0.0))) return mu;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    if (side(inst, f, j, exact) != sides[j]) return mu;
  }
  return exact;
}

}  // namespace

namespace {

Solution bisect(const ProblemInstance& inst, const OracleConfig& cfg) {
  Solution sol;
  const Formulas f(inst);
  const std::size_t n = inst.size();
  auto fill = [&](double mu) {
    sol.mu = mu;
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = f.x(j, mu);
  };

  if (inst.sense == Sense::LessEqual) {
    const Usage at_zero = usage(inst, f, 0.0);
    if (at_zero.value <= inst.b + 1e-12 * std::max(1.0, std::abs(inst.b))) {
      fill(0.0);
      sol.status = Status::Optimal;
      return sol;
    }
  }

  // x_j(mu) sits at u_j for mu <= mu^u_j and at l_j for mu >= mu^l_j.
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = inst.a[j];
    const double mu_u = -f.phi_prime(j, inst.u[j]) / a;
    const double mu_l = -f.phi_prime(j, inst.l[j]) / a;
    if (std::isfinite(mu_u)) lo = std::min(lo, mu_u);
    if (std::isfinite(mu_l)) hi = std::max(hi, mu_l);
  }
  if (!std::isfinite(lo)) lo = f.positive_dual() ? 1.0 : -1.0;
  if (!std::isfinite(hi)) hi = std::max(lo, 1.0);
  if (f.positive_dual()) {
    lo = std::max(lo, std::numeric_limits<double>::min());
    hi = std::max(hi, lo);
  }
  // Terms with an unbounded lower breakpoint never reach l_j; push hi until
  // the usage drops below b.
  for (int k = 0; k < 2000 && usage(inst, f, hi).value > inst.b; ++k) {
    hi = f.positive_dual() ? hi * 4.0 : hi + 4.0 * std::max(1.0, std::abs(hi));
  }
  for (int k = 0; k < 2000 && usage(inst, f, lo).value < inst.b; ++k) {
    lo = f.positive_dual() ? lo * 0.25 : lo - 4.0 * std::max(1.0, std::abs(lo));
  }
  const Usage at_lo = usage(inst, f, lo);
  const Usage at_hi = usage(inst, f, hi);
  const double feas = std::max(1e-10 * std::abs(inst.b), 1e-12);
  if (at_lo.value < inst.b - feas || at_hi.value > inst.b + feas) {
    sol.status = Status::Failed;
    fill(0.5 * (lo + hi));
    return sol;
  }

  double mu = 0.5 * (lo + hi);
  int iter = 0;
  while (iter < cfg.max_iter) {
    ++iter;
    mu = 0.5 * (lo + hi);
    const Usage at = usage(inst, f, mu);
    const double gap = at.value - inst.b;
    if (std::abs(gap) <= 4.0 * std::numeric_limits<double>::epsilon() * at.magnitude) break;
    if (gap > 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }
    if (hi - lo <= cfg.mu_tol * std::max(1.0, std::abs(mu))) {
      mu = 0.5 * (lo + hi);
      break;
    }
  }

  mu = polish(inst, f, mu);
  fill(mu);
  sol.iterations = iter;
  const double resid = std::abs(usage(inst, f, mu).value - inst.b);
  sol.status = resid <= feas ? Status::Optimal : Status::Failed;
  return sol;
}

}  // namespace

Solution bisection_solve(const ProblemInstance& inst, const OracleConfig& cfg) {
  if (!(cfg.mu_tol > 0.0) || cfg.max_iter < 1) throw std::invalid_argument("bad oracle config");
  const detail::Stopwatch clock;
  Solution sol = bisect(inst, cfg);
  sol.elapsed = clock.elapsed();
  return sol;
}

KktReport verify(const ProblemInstance& inst, const Solution& sol) {
  if (sol.x.size() != inst.size()) throw std::invalid_argument("solution length differs from n");
  return kkt_residual(inst, sol.x, sol.mu);
}

std::size_t interior_count(const ProblemInstance& inst, std::span<const double> x) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double width = kBoundaryWidth * (inst.u[j] - inst.l[j]);
    if (x[j] > inst.l[j] + width && x[j] < inst.u[j] - width) ++count;
  }
  return count;
}

}  // namespace nrap
