#include <doctest.h>

#include <cmath>
#include <limits>

#include "nrap/problem.hpp"
#include "support.hpp"

using namespace nrap;

namespace {

ProblemInstance one_term(Family family, double a, double p1, double p2, double l, double u) {
  ProblemInstance p;
  p.family = family;
  p.a = {a};
  p.p1 = {p1};
  if (family == Family::Quadratic || family == Family::StratifiedSampling ||
      family == Family::TheoryOfSearch) {
    p.p2 = {p2};
  }
  p.l = {l};
  p.u = {u};
  p.b = a * 0.5 * (l + u);
  return p;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Root of phi'_j(x) + mu a_j on [l_j, u_j] by plain bisection on x.
double root_by_bisection(const ProblemInstance& inst, std::size_t j, double mu) {
  double lo = inst.l[j], hi = inst.u[j];
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (derivative(inst, j, mid) + mu * inst.a[j] < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("primal_from_dual on hand-checked points") {
  CHECK(primal_from_dual(test::single(), -0.5, 0) == doctest::Approx(0.5));
  CHECK(primal_from_dual(one_term(Family::Quadratic, 1, 1, 6, 0, 2), 1.0, 0) == 2.0);
  CHECK(primal_from_dual(one_term(Family::NegativeEntropy, 1, 100, 0, 20, 200), 0.0, 0) ==
        doctest::Approx(100.0));
}

TEST_CASE("compute_breakpoints on hand-checked instances") {
  const Breakpoints q = compute_breakpoints(test::q_peg2());
  CHECK(q.mu_l == std::vector<double>{6, 3, 0});
  CHECK(q.mu_u == std::vector<double>{4, 1, -2});

  const Breakpoints sym = compute_breakpoints(one_term(Family::Quadratic, 1, 1, 0, -1, 1));
  CHECK(sym.mu_l[0] == 1.0);
  CHECK(sym.mu_u[0] == -1.0);

  const Breakpoints s = compute_breakpoints(one_term(Family::Sampling, 2, 20, 0, 1, 4));
  CHECK(s.mu_l[0] == doctest::Approx(10.0));
  CHECK(s.mu_u[0] == doctest::Approx(0.625));
}

TEST_CASE("kkt_residual") {
  const ProblemInstance q = test::q_peg2();
  const std::vector<double> x{2, 2, 0};
  CHECK(kkt_residual(q, x, 1.0).max_residual == 0.0);

  const KktReport bad = kkt_residual(q, x, 5.0);
  CHECK(bad.stationarity_residual == doctest::Approx(4.0));
  CHECK(bad.feasibility_residual == 0.0);
  CHECK_FALSE(bad.passes(1e-8));

  CHECK(kkt_residual(test::symmetric(), std::vector<double>{0.5, 0.5}, -0.5).max_residual == 0.0);

  SUBCASE("out-of-bounds x is reported as an infinite defect") {
    CHECK(std::isinf(kkt_residual(q, std::vector<double>{2.5, 1.5, 0}, 1.0).stationarity_residual));
  }
  SUBCASE("inequality sense checks sign and complementarity") {
    ProblemInstance le = q;
    le.sense = Sense::LessEqual;
    le.b = 5;
    const KktReport r = kkt_residual(le, x, 1.0);
    CHECK(r.feasibility_residual == 0.0);
    CHECK(r.complementarity_residual == doctest::Approx(0.2));
    CHECK(kkt_residual(le, x, -1.0).sign_violation == 1.0);
  }
}

TEST_CASE("eval_objective") {
  CHECK(eval_objective(one_term(Family::Quadratic, 1, 2, 4, 0, 5), std::vector<double>{3}) == -3.0);
  CHECK(eval_objective(one_term(Family::TheoryOfSearch, 1, 1, 1, 0, 1), std::vector<double>{0}) == 0.0);
  CHECK(eval_objective(one_term(Family::NegativeEntropy, 1, 1, 0, 0.5, 2), std::vector<double>{1}) ==
        -1.0);
  CHECK_THROWS_AS(eval_objective(one_term(Family::Sampling, 1, 1, 0, 0, 2), std::vector<double>{0}),
                  std::domain_error);
}

TEST_CASE("validate rejects broken instances") {
  ProblemInstance p = test::q_peg2();
  CHECK_NOTHROW(validate(p));
  p.l[1] = 3;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = test::q_peg2();
  p.a[0] = 0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = test::q_peg2();
  p.b = 7;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p.sense = Sense::LessEqual;
  CHECK_NOTHROW(validate(p));
  p = one_term(Family::NegativeEntropy, 2, 100, 0, 20, 200);
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("property: the dual map is monotone, consistent at breakpoints and inverts phi'") {
  Rng rng(11);
  for (Family family : kAllFamilies) {
    CAPTURE(to_string(family));
    for (int trial = 0; trial < 40; ++trial) {
      const ProblemInstance inst = test::random_instance(rng, family, 8);
      const Breakpoints bp = compute_breakpoints(inst);
      for (std::size_t j = 0; j < inst.size(); ++j) {
        REQUIRE(bp.mu_u[j] <= bp.mu_l[j]);
        CHECK(rel(primal_from_dual(inst, bp.mu_l[j], j), inst.l[j]) <= 1e-10);
        CHECK(rel(primal_from_dual(inst, bp.mu_u[j], j), inst.u[j]) <= 1e-10);

        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 16; ++k) {
          const double mu = bp.mu_u[j] + (bp.mu_l[j] - bp.mu_u[j]) * (k / 16.0);
          const double x = primal_from_dual(inst, mu, j);
          CHECK(x <= prev);
          prev = x;
        }

        const double mu = bp.mu_u[j] + (bp.mu_l[j] - bp.mu_u[j]) * rng.uniform(0.05, 0.95);
        const double x = primal_from_dual(inst, mu, j);
        const double d = derivative(inst, j, x);
        CHECK(std::abs(d + mu * inst.a[j]) <= 1e-10 * std::max(1.0, std::abs(d)));
        CHECK(rel(x, root_by_bisection(inst, j, mu)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("property: objectives are convex") {
  Rng rng(12);
  for (Family family : kAllFamilies) {
    CAPTURE(to_string(family));
    for (int trial = 0; trial < 100; ++trial) {
      const ProblemInstance inst = test::random_instance(rng, family, 5);
      std::vector<double> x(5), y(5), mid(5);
      const double t = rng.uniform(0.01, 0.99);
      for (std::size_t j = 0; j < 5; ++j) {
        x[j] = rng.uniform(inst.l[j], inst.u[j]);
        y[j] = rng.uniform(inst.l[j], inst.u[j]);
        mid[j] = t * x[j] + (1 - t) * y[j];
      }
      const double fx = eval_objective(inst, x);
      const double fy = eval_objective(inst, y);
      const double rhs = t * fx + (1 - t) * fy;
      CHECK(eval_objective(inst, mid) <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}
