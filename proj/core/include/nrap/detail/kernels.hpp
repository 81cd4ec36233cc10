#pragma once

// Closed-form per-family pieces shared by every solver. A kernel works on a
// Terms view whose p/q arrays hold the family's canonical coefficients:
//
//   QuadraticKernel      p = w, q = c       x(mu) = (c - mu a) / w
//   InverseSquareKernel  p = k             x(mu) = sqrt(k / (a mu))       (Sampling, StratifiedSampling)
//   SearchKernel         p = m, q = b      x(mu) = ln(m b / (a mu)) / b
//   EntropyKernel        p = c             x(mu) = c exp(-a mu)
//
// The unbounded resource use of a set S, R_S(mu) = sum_S a_j x_j(mu), is kept
// as two running sums (s1, s2) so that it can be evaluated and inverted in
// O(1):
//
//   Quadratic      R = s1 - s2 mu        s1 = sum a c / w,             s2 = sum a^2 / w
//   InverseSquare  R = s1 / sqrt(mu)     s1 = sum sqrt(a k)
//   Search         R = s1 - s2 ln(mu)    s1 = sum (a / b) ln(m b / a), s2 = sum a / b
//   Entropy        R = s1 exp(-mu)       s1 = sum c                    (a == 1)
//
// Each kernel also exposes a "scale" theta, a monotone reparametrisation of mu
// in which x_j is cheapest to evaluate; the primal relaxation works in theta.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nrap/problem.hpp"

namespace nrap::detail {

struct Terms {
  std::span<const double> a;
  std::span<const double> p;
  std::span<const double> q;
  std::span<const double> l;
  std::span<const double> u;
  std::size_t size() const { return a.size(); }
};

struct Aggregate {
  double s1 = 0.0;
  double s2 = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadraticKernel {
  static constexpr bool kPositiveDual = false;

  static double derivative(const Terms& t, std::size_t j, double x) { return t.p[j] * x - t.q[j]; }
  static double interior(const Terms& t, std::size_t j, double mu) {
    return (t.q[j] - mu * t.a[j]) / t.p[j];
  }
  static double interior_slope(const Terms& t, std::size_t j, double) { return -t.a[j] / t.p[j]; }

  static void add(Aggregate& g, const Terms& t, std::size_t j) {
    const double aw = t.a[j] / t.p[j];
    g.s1 += aw * t.q[j];
    g.s2 += aw * t.a[j];
  }
  static void remove(Aggregate& g, const Terms& t, std::size_t j) {
    const double aw = t.a[j] / t.p[j];
    g.s1 -= aw * t.q[j];
    g.s2 -= aw * t.a[j];
  }
  static double usage(const Aggregate& g, double mu) { return g.s1 - g.s2 * mu; }
  static double solve(const Aggregate& g, double bk) { return (g.s1 - bk) / g.s2; }

  static double scale(const Aggregate& g, double bk) { return solve(g, bk); }
  static double from_scale(const Terms& t, std::size_t j, double theta) { return interior(t, j, theta); }
  static double mu_of_scale(double theta) { return theta; }
};

struct InverseSquareKernel {
  static constexpr bool kPositiveDual = true;

  static double derivative(const Terms& t, std::size_t j, double x) { return -t.p[j] / (x * x); }
  static double interior(const Terms& t, std::size_t j, double mu) {
    return std::sqrt(t.p[j] / (t.a[j] * mu));
  }
  static double interior_slope(const Terms& t, std::size_t j, double mu) {
    return -0.5 * interior(t, j, mu) / mu;
  }

  static void add(Aggregate& g, const Terms& t, std::size_t j) { g.s1 += std::sqrt(t.a[j] * t.p[j]); }
  static void remove(Aggregate& g, const Terms& t, std::size_t j) { g.s1 -= std::sqrt(t.a[j] * t.p[j]); }
  static double usage(const Aggregate& g, double mu) { return g.s1 / std::sqrt(mu); }
  static double solve(const Aggregate& g, double bk) {
    if (!(bk > 0.0)) throw std::domain_error("relaxed problem needs positive resource");
    const double r = g.s1 / bk;
    return r * r;
  }

  // theta = 1 / sqrt(mu)
  static double scale(const Aggregate& g, double bk) {
    if (!(bk > 0.0)) throw std::domain_error("relaxed problem needs positive resource");
    return bk / g.s1;
  }
  static double from_scale(const Terms& t, std::size_t j, double theta) {
    return std::sqrt(t.p[j] / t.a[j]) * theta;
  }
  static double mu_of_scale(double theta) { return 1.0 / (theta * theta); }
};

struct SearchKernel {
  static constexpr bool kPositiveDual = true;

  static double derivative(const Terms& t, std::size_t j, double x) {
    return -t.p[j] * t.q[j] * std::exp(-t.q[j] * x);
  }
  static double interior(const Terms& t, std::size_t j, double mu) {
    return std::log(t.p[j] * t.q[j] / (t.a[j] * mu)) / t.q[j];
  }
  static double interior_slope(const Terms& t, std::size_t j, double mu) { return -1.0 / (t.q[j] * mu); }

  static void add(Aggregate& g, const Terms& t, std::size_t j) {
    const double ab = t.a[j] / t.q[j];
    g.s1 += ab * std::log(t.p[j] * t.q[j] / t.a[j]);
    g.s2 += ab;
  }
  static void remove(Aggregate& g, const Terms& t, std::size_t j) {
    const double ab = t.a[j] / t.q[j];
    g.s1 -= ab * std::log(t.p[j] * t.q[j] / t.a[j]);
    g.s2 -= ab;
  }
  static double usage(const Aggregate& g, double mu) { return g.s1 - g.s2 * std::log(mu); }
  static double solve(const Aggregate& g, double bk) { return std::exp((g.s1 - bk) / g.s2); }

  // theta = ln(mu)
  static double scale(const Aggregate& g, double bk) { return (g.s1 - bk) / g.s2; }
  static double from_scale(const Terms& t, std::size_t j, double theta) {
    return (std::log(t.p[j] * t.q[j] / t.a[j]) - theta) / t.q[j];
  }
  static double mu_of_scale(double theta) { return std::exp(theta); }
};

struct EntropyKernel {
  static constexpr bool kPositiveDual = false;

  static double derivative(const Terms& t, std::size_t j, double x) { return std::log(x / t.p[j]); }
  static double interior(const Terms& t, std::size_t j, double mu) {
    return t.p[j] * std::exp(-t.a[j] * mu);
  }
  static double interior_slope(const Terms& t, std::size_t j, double mu) {
    return -t.a[j] * interior(t, j, mu);
  }

  static void add(Aggregate& g, const Terms& t, std::size_t j) { g.s1 += t.a[j] * t.p[j]; }
  static void remove(Aggregate& g, const Terms& t, std::size_t j) { g.s1 -= t.a[j] * t.p[j]; }
  static double usage(const Aggregate& g, double mu) { return g.s1 * std::exp(-mu); }
  static double solve(const Aggregate& g, double bk) {
    if (!(bk > 0.0)) throw std::domain_error("relaxed problem needs positive resource");
    return std::log(g.s1 / bk);
  }

  // theta = exp(-mu)
  static double scale(const Aggregate& g, double bk) {
    if (!(bk > 0.0)) throw std::domain_error("relaxed problem needs positive resource");
    return bk / g.s1;
  }
  static double from_scale(const Terms& t, std::size_t j, double theta) { return t.p[j] * theta; }
  static double mu_of_scale(double theta) { return -std::log(theta); }
};

// Breakpoint of index j at bound value x: -phi_j'(x) / a_j.
template <class K>
double breakpoint_at(const Terms& t, std::size_t j, double x) {
  return -K::derivative(t, j, x) / t.a[j];
}

// Canonical coefficients for an instance. Owns the derived k_j of the
// stratified family; views the instance arrays otherwise.
class PreparedTerms {
 public:
  explicit PreparedTerms(const ProblemInstance& inst);

  const Terms& terms() const { return terms_; }

 private:
  std::vector<double> derived_;
  Terms terms_;
};

template <class Fn>
decltype(auto) with_kernel(Family family, Fn&& fn) {
  switch (family) {
    case Family::Quadratic:
      return std::forward<Fn>(fn)(QuadraticKernel{});
    case Family::StratifiedSampling:
    case Family::Sampling:
      return std::forward<Fn>(fn)(InverseSquareKernel{});
    case Family::TheoryOfSearch:
      return std::forward<Fn>(fn)(SearchKernel{});
    case Family::NegativeEntropy:
      return std::forward<Fn>(fn)(EntropyKernel{});
  }
  throw std::logic_error("unknown family");
}

// Clamped x_j(mu) given the precomputed breakpoints of j.
template <class K>
double clamped(const Terms& t, std::size_t j, double mu, double mu_l, double mu_u) {
  if (mu >= mu_l) return t.l[j];
  if (mu <= mu_u) return t.u[j];
  const double x = K::interior(t, j, mu);
  return x < t.l[j] ? t.l[j] : (x > t.u[j] ? t.u[j] : x);
}

}  // namespace nrap::detail
