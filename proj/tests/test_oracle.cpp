#include <doctest.h>

#include <cmath>

#include "nrap/generator.hpp"
#include "nrap/oracle.hpp"
#include "support.hpp"

using namespace nrap;

TEST_CASE("bisection_solve on hand-checked instances") {
  const Solution sym = bisection_solve(test::symmetric());
  CHECK(sym.status == Status::Optimal);
  CHECK(sym.x[0] == doctest::Approx(0.5));
  CHECK(sym.x[1] == doctest::Approx(0.5));
  CHECK(sym.mu == doctest::Approx(-0.5));

  const Solution q = bisection_solve(test::q_peg2());
  CHECK(q.x == std::vector<double>{2, 2, 0});
  CHECK(q.mu >= 0.0);
  CHECK(q.mu <= 1.0);
  CHECK(verify(test::q_peg2(), q).max_residual == 0.0);

  const Solution tie = bisection_solve(test::q_tie());
  CHECK(tie.x == std::vector<double>{1, 0});
  CHECK(tie.mu >= 0.0);
  CHECK(tie.mu <= 3.0);
}

TEST_CASE("verify") {
  Solution s;
  s.x = {2, 2, 0};
  s.mu = 1;
  CHECK(verify(test::q_peg2(), s).passes(1e-8));
  s.mu = 5;
  const KktReport r = verify(test::q_peg2(), s);
  CHECK_FALSE(r.passes(1e-8));
  CHECK(r.stationarity_residual == doctest::Approx(4.0));
  s.x = {0.5, 0.5};
  s.mu = -0.5;
  CHECK(verify(test::symmetric(), s).passes(1e-8));
  s.x = {0.5};
  CHECK_THROWS_AS(verify(test::symmetric(), s), std::invalid_argument);
}

TEST_CASE("inequality sense takes mu = 0 when the constraint is slack") {
  ProblemInstance p = test::q_peg2();
  p.sense = Sense::LessEqual;
  p.b = 5;
  const Solution s = bisection_solve(p);
  CHECK(s.mu == 0.0);
  CHECK(s.x == std::vector<double>{2, 2, 0});
  p.b = 4;
  CHECK(bisection_solve(p).mu >= 0.0);
}

// mu* and x* of generated instances (n=10, h_frac=0.5, seed=7), from a
// 50-digit bisection on the instance files written by `nrap gen`.
TEST_CASE("frozen reference solutions") {
  struct Reference {
    Family family;
    double mu;
    std::vector<double> x;
  };
  const Reference refs[] = {
      {Family::Quadratic, -1.8559024579680622037,
       {2.6400257649464631, 4.9638959923057302, 6.8839846818877426, 2.804563442571396,
        3.0337662474949826, 4.1251740411448688, 2.2963662804287654, 3.7192188610048342,
        3.0045374991574184, 2.5200857973547586}},
      {Family::StratifiedSampling, 0.0056383858749216273705,
       {1.5262130637842583, 2.0290038295280644, 5.3820417786544574, 2.8342624937482001,
        3.0020825249450736, 2.9298060165352977, 3.3359925368190018, 1.1498312259906645,
        2.5188140124704659, 4.2050016956920757}},
      {Family::Sampling, 2.0914340467811655613,
       {3.5540444936543323, 1.6703999813073502, 2.9112382402796828, 3.1684070112957889,
        2.6861550518374511, 2.3365362327539336, 1.9289420872981937, 2.5700173543561223,
        2.5687748548560662, 2.3184448976498584}},
      {Family::TheoryOfSearch, 1.3780195132259760741,
       {0.071222346944171885, 1.4741310378854664, 1.371075694480862, 0.53267858075710393,
        0.87059591090933927, 0.64727211584063136, 0.064082446613902388, 0.5318792485275301,
        0.90257631122713497, 0.053895374907348276}},
      {Family::NegativeEntropy, 0.58465479485624535634,
       {119.77701754822656, 58.552397656104418, 52.42325319518892, 58.48426351117574,
        42.157584069678904, 47.92131659075303, 104.09591037250806, 108.38825416584419,
        52.226890949660812, 84.065766281215292}},
  };
  for (const Reference& ref : refs) {
    CAPTURE(to_string(ref.family));
    const ProblemInstance inst = generate({ref.family, 10, 0.5, 7, Sense::Equality});
    const Solution s = bisection_solve(inst);
    CHECK(s.status == Status::Optimal);
    CHECK(std::abs(s.mu - ref.mu) <= 1e-12 * std::max(1.0, std::abs(ref.mu)));
    CHECK(test::max_abs_diff(s.x, ref.x) <= 1e-12 * std::max(1.0, test::inf_norm(ref.x)));
  }
}

TEST_CASE("property: oracle solutions of generated instances satisfy KKT") {
  for (Family family : kAllFamilies) {
    for (std::size_t n : {10u, 100u, 1000u}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CAPTURE(to_string(family));
        CAPTURE(n);
        CAPTURE(seed);
        const double h = static_cast<double>(seed % 5) / 4.0;
        const ProblemInstance inst = generate({family, n, h, seed, Sense::Equality});
        const Solution s = bisection_solve(inst);
        REQUIRE(s.status == Status::Optimal);
        const KktReport r = verify(inst, s);
        CHECK(r.passes(1e-7));
        CHECK(r.max_residual <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: oracle handles arbitrary feasible right-hand sides") {
  Rng rng(21);
  for (Family family : kAllFamilies) {
    for (int trial = 0; trial < 30; ++trial) {
      const ProblemInstance inst = test::random_instance(rng, family, 1 + rng.below(50));
      const Solution s = bisection_solve(inst);
      CAPTURE(to_string(family));
      CHECK(s.status == Status::Optimal);
      CHECK(verify(inst, s).max_residual <= 1e-10);
    }
  }
}
