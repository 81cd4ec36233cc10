#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nrap/generator.hpp"
#include "nrap/problem.hpp"

namespace nrap::test {

// n=3, w=1, c=(6,3,0), a=1, l=0, u=2, b=4; optimum x=(2,2,0), mu=1.
inline ProblemInstance q_peg2() {
  ProblemInstance p;
  p.family = Family::Quadratic;
  p.b = 4;
  p.a = {1, 1, 1};
  p.p1 = {1, 1, 1};
  p.p2 = {6, 3, 0};
  p.l = {0, 0, 0};
  p.u = {2, 2, 2};
  return p;
}

// n=2, w=1, c=0, a=1, l=0, u=1, b=1; optimum x=(0.5,0.5), mu=-0.5.
inline ProblemInstance symmetric() {
  ProblemInstance p;
  p.family = Family::Quadratic;
  p.b = 1;
  p.a = {1, 1};
  p.p1 = {1, 1};
  p.p2 = {0, 0};
  p.l = {0, 0};
  p.u = {1, 1};
  return p;
}

// n=2, w=1, c=(4,0), a=1, l=0, u=1, b=1; optimum x=(1,0), mu anywhere in [0,3].
inline ProblemInstance q_tie() {
  ProblemInstance p = symmetric();
  p.p2 = {4, 0};
  return p;
}

// One quadratic term, w=1, c=0, a=1, bounds [-10, 10], b=2.
inline ProblemInstance single(double b = 2) {
  ProblemInstance p;
  p.family = Family::Quadratic;
  p.b = b;
  p.a = {1};
  p.p1 = {1};
  p.p2 = {0};
  p.l = {-10};
  p.u = {10};
  return p;
}

// Parameters drawn from the family ranges with b anywhere in the feasible
// interval, so the number of interior variables is uncontrolled.
inline ProblemInstance random_instance(Rng& rng, Family family, std::size_t n,
                                       Sense sense = Sense::Equality) {
  ProblemInstance p;
  p.family = family;
  p.sense = sense;
  p.a.resize(n);
  p.p1.resize(n);
  if (family == Family::Quadratic || family == Family::StratifiedSampling ||
      family == Family::TheoryOfSearch) {
    p.p2.resize(n);
  }
  p.l.resize(n);
  p.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    switch (family) {
      case Family::Quadratic:
        p.a[j] = rng.uniform(1, 30);
        p.p1[j] = rng.uniform(1, 20);
        p.p2[j] = rng.uniform(-25, 25);
        p.l[j] = rng.uniform(-3, 3);
        p.u[j] = p.l[j] + rng.uniform_above(0, 8);
        break;
      case Family::StratifiedSampling:
        p.a[j] = rng.uniform(1, 30);
        p.p1[j] = rng.uniform(5, 30);
        p.p2[j] = rng.uniform(1, 4);
        p.l[j] = rng.uniform(1, 3);
        p.u[j] = rng.uniform_above(3, 15);
        break;
      case Family::Sampling:
        p.a[j] = rng.uniform(1, 4);
        p.p1[j] = rng.uniform(5, 30);
        p.l[j] = std::max(rng.uniform(0, 3), 1e-6);
        p.u[j] = rng.uniform_above(3, 6);
        break;
      case Family::TheoryOfSearch:
        p.a[j] = rng.uniform(1, 3);
        p.p1[j] = rng.uniform(0.5, 8);
        p.p2[j] = rng.uniform(0.1, 3);
        p.l[j] = rng.uniform(0, 0.1);
        p.u[j] = rng.uniform_above(0.1, 5);
        break;
      case Family::NegativeEntropy:
        p.a[j] = 1;
        p.p1[j] = rng.uniform(50, 250);
        p.l[j] = rng.uniform(20, 100);
        p.u[j] = p.l[j] + rng.uniform_above(0, 110);
        break;
    }
  }
  double lo = 0, hi = 0;
  for (std::size_t j = 0; j < n; ++j) {
    lo += p.a[j] * p.l[j];
    hi += p.a[j] * p.u[j];
  }
  p.b = lo + (hi - lo) * rng.uniform(0.02, 0.98);
  return p;
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0;
  for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, std::abs(x[j] - y[j]));
  return d;
}

inline double inf_norm(const std::vector<double>& x) {
  double d = 0;
  for (double v : x) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace nrap::test
