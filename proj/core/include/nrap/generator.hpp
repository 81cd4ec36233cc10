#pragma once

#include <cstdint>

#include "nrap/problem.hpp"

namespace nrap {

// xoshiro256** seeded through splitmix64. Integer outputs and the derived
// doubles are fully specified, so a seed means the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // [0, 1) with 53 random mantissa bits.
  double uniform();
  // [lo, hi)
  double uniform(double lo, double hi);
  // (lo, hi]
  double uniform_above(double lo, double hi);
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
};

struct GenSpec {
  Family family = Family::Quadratic;
  std::size_t n = 0;
  double h_frac = 0.5;
  std::uint64_t seed = 0;
  Sense sense = Sense::Equality;
};

// Instance whose optimum has exactly round(h_frac * n) variables strictly
// inside their bounds. Throws std::invalid_argument on a bad spec and
// std::runtime_error if the construction cannot be completed.
ProblemInstance generate(const GenSpec& spec);

}  // namespace nrap
