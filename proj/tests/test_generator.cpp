#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string_view>

#include "nrap/generator.hpp"
#include "nrap/io.hpp"
#include "nrap/oracle.hpp"

using namespace nrap;

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t interior_of(const ProblemInstance& inst) {
  return interior_count(inst, bisection_solve(inst).x);
}

}  // namespace

TEST_CASE("xoshiro256** stream is frozen") {
  Rng zero(0);
  CHECK(zero.next() == 0x99ec5f36cb75f2b4ULL);
  CHECK(zero.next() == 0xbf6e1f784956452aULL);
  CHECK(zero.next() == 0x1a5f849d4933e6e0ULL);
  CHECK(zero.next() == 0x6aa594f1262d2d2cULL);
  Rng answer(42);
  CHECK(answer.next() == 0x15780b2e0c2ec716ULL);
  CHECK(answer.next() == 0x6104d9866d113a7eULL);
  CHECK(answer.next() == 0xae17533239e499a1ULL);
  CHECK(answer.next() == 0xecb8ad4703b360a1ULL);
}

TEST_CASE("derived draws stay in range") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double above = rng.uniform_above(2.0, 3.0);
    CHECK((above > 2.0 && above <= 3.0));
    CHECK(rng.below(7) < 7);
  }
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("generated files are byte-stable") {
  struct Expected {
    Family family;
    std::uint64_t hash;
    std::size_t bytes;
  };
  const Expected table[] = {
      {Family::Quadratic, 0xdc190702f95b1087ULL, 1006},
      {Family::StratifiedSampling, 0x2bdeed186080caedULL, 1006},
      {Family::Sampling, 0x7d64553f51acbfd8ULL, 819},
      {Family::TheoryOfSearch, 0xc47d3439b5d5d144ULL, 1031},
      {Family::NegativeEntropy, 0xccd2578d1137fbdfULL, 624},
  };
  for (const Expected& e : table) {
    const std::string text = format_instance(generate({e.family, 10, 0.5, 7, Sense::Equality}));
    CAPTURE(to_string(e.family));
    CHECK(text.size() == e.bytes);
    CHECK(fnv1a(text) == e.hash);
  }
}

TEST_CASE("interior count at the extremes") {
  CHECK(interior_of(generate({Family::Quadratic, 10, 1.0, 7, Sense::Equality})) == 10);
  CHECK(interior_of(generate({Family::Quadratic, 10, 0.0, 7, Sense::Equality})) == 0);
  for (Family family : kAllFamilies) {
    CAPTURE(to_string(family));
    CHECK(interior_of(generate({family, 1000, 0.5, 1, Sense::Equality})) == 500);
  }
}

TEST_CASE("bad specs are rejected") {
  CHECK_THROWS_AS(generate({Family::Quadratic, 0, 0.5, 1, Sense::Equality}), std::invalid_argument);
  CHECK_THROWS_AS(generate({Family::Quadratic, 10, 1.5, 1, Sense::Equality}), std::invalid_argument);
  CHECK_THROWS_AS(generate({Family::Quadratic, 10, -0.1, 1, Sense::Equality}), std::invalid_argument);
}

TEST_CASE("property: exact interior count, validity and determinism") {
  Rng rng(61);
  for (Family family : kAllFamilies) {
    for (int trial = 0; trial < 40; ++trial) {
      const GenSpec spec{family, 1 + rng.below(400), rng.uniform(), rng.next(),
                         trial % 2 ? Sense::LessEqual : Sense::Equality};
      const ProblemInstance inst = generate(spec);
      CAPTURE(to_string(family));
      CAPTURE(spec.n);
      CAPTURE(spec.h_frac);
      CHECK_NOTHROW(validate(inst));
      CHECK(inst.sense == spec.sense);
      CHECK(inst == generate(spec));
      const auto target = static_cast<std::size_t>(std::llround(spec.h_frac * static_cast<double>(spec.n)));
      ProblemInstance as_equality = inst;
      as_equality.sense = Sense::Equality;
      CHECK(interior_of(as_equality) == target);
    }
  }
}
