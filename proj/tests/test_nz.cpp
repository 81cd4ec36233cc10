#include <doctest.h>

#include <cmath>

#include "nrap/newton_nz.hpp"
#include "nrap/oracle.hpp"
#include "support.hpp"

using namespace nrap;

TEST_CASE("psi on a single quadratic term") {
  const ProblemInstance p = test::single();
  CHECK(psi(p, 0.0) == 2.0);
  CHECK(psi(p, -2.0) == 0.0);
  CHECK(psi(p, -100.0) == -8.0);
  CHECK(psi(p, 100.0) == 12.0);
  CHECK(psi_plus(p, -100.0) == -8.0);
  CHECK(psi_minus(p, 100.0) == 12.0);
}

TEST_CASE("nz_step") {
  NzConfig cfg;
  cfg.eps = 1e-9;
  const NzStep first = nz_step(test::single(), 0.0, cfg);
  CHECK_FALSE(first.converged);
  CHECK(first.mu == doctest::Approx(-2.0));
  const NzStep second = nz_step(test::single(), -2.0, cfg);
  CHECK(second.converged);
  CHECK(second.mu == -2.0);
  CHECK(nz_step(test::symmetric(), -0.5, cfg).converged);
}

TEST_CASE("solve_nz reaches the requested relative residual") {
  const NzResult single = solve_nz(test::single());
  CHECK(single.solution.status == Status::Approximate);
  CHECK(single.solution.mu == doctest::Approx(-2.0));
  CHECK(single.solution.x[0] == doctest::Approx(2.0));
  CHECK(single.trace.iterations <= 2);

  const NzResult sym = solve_nz(test::symmetric());
  CHECK(sym.solution.status == Status::Approximate);
  CHECK(sym.trace.final_relative_residual < 0.01);
}

TEST_CASE("inequality sense with a fitting zero dual") {
  ProblemInstance p = test::q_peg2();
  p.sense = Sense::LessEqual;
  p.b = 10;
  const NzResult r = solve_nz(p);
  CHECK(r.solution.status == Status::Approximate);
  CHECK(r.solution.mu == 0.0);
}

TEST_CASE("sampling instance with few interior variables") {
  const ProblemInstance inst = generate({Family::Sampling, 10'000, 0.1, 3, Sense::Equality});
  NzConfig cfg;
  cfg.per_start_time_cap = std::chrono::seconds(5);
  cfg.total_time_cap = std::chrono::seconds(15);
  const NzResult r = solve_nz(inst, cfg);
  if (r.solution.status == Status::Approximate) {
    CHECK(r.trace.final_relative_residual < cfg.eps);
  } else {
    CHECK(r.solution.status == Status::Failed);
  }
}

TEST_CASE("property: psi envelopes and monotonicity") {
  Rng rng(53);
  for (Family family : kAllFamilies) {
    for (int trial = 0; trial < 30; ++trial) {
      const ProblemInstance inst = test::random_instance(rng, family, 1 + rng.below(60));
      const double centre = bisection_solve(inst).mu;
      std::vector<double> grid;
      for (int k = -20; k <= 20; ++k) {
        grid.push_back(requires_positive_dual(family) ? centre * std::pow(2.0, k / 4.0)
                                                      : centre + std::max(1.0, std::abs(centre)) * k / 10.0);
      }
      const double slack = 1e-12 * std::max(1.0, std::abs(inst.b));
      double prev = -INFINITY;
      for (double mu : grid) {
        CAPTURE(to_string(family));
        CAPTURE(mu);
        const double v = psi(inst, mu);
        CHECK(psi_minus(inst, mu) <= v + slack);
        CHECK(v <= psi_plus(inst, mu) + slack);
        CHECK(v >= prev - slack);
        prev = v;
      }
    }
  }
}

TEST_CASE("property: approximate results honour the tolerance and are deterministic") {
  Rng rng(59);
  NzConfig cfg;
  cfg.per_start_time_cap = std::chrono::seconds(2);
  cfg.total_time_cap = std::chrono::seconds(6);
  for (Family family : kAllFamilies) {
    for (int trial = 0; trial < 15; ++trial) {
      const ProblemInstance inst =
          generate({family, 1 + rng.below(500), rng.uniform(0.0, 1.0), rng.next(), Sense::Equality});
      const NzResult r = solve_nz(inst, cfg);
      CAPTURE(to_string(family));
      if (r.solution.status == Status::Approximate) {
        const double used = resource_usage(inst, r.solution.x);
        CHECK(std::abs(used / inst.b - 1.0) < cfg.eps);
        for (std::size_t j = 0; j < inst.size(); ++j) {
          CHECK(r.solution.x[j] >= inst.l[j]);
          CHECK(r.solution.x[j] <= inst.u[j]);
        }
      }
      const NzResult again = solve_nz(inst, cfg);
      CHECK(again.solution.status == r.solution.status);
      if (r.solution.status != Status::Failed) {
        CHECK(again.solution.x == r.solution.x);
        CHECK(again.trace.iterations == r.trace.iterations);
      }
    }
  }
}
