#include "nrap/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nrap/detail/kernels.hpp"
#include "nrap/detail/sum.hpp"

namespace nrap {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::uniform_above(double lo, double hi) { return hi - (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = next();
    if (r >= limit) return r % bound;
  }
}

namespace {

constexpr int kPilot = 1000;
constexpr int kTries = 1000;
constexpr double kSamplingFloor = 1e-6;

enum class Role { Interior, Lower, Upper };

// One index worth of raw parameters in file-column order.
struct Tuple {
  double a = 1.0, p1 = 0.0, p2 = 0.0, l = 0.0, u = 0.0;
};

class Drawer {
 public:
  Drawer(Family family, Rng& rng) : family_(family), rng_(rng) {}

  // given_m > 0 fixes the stratum size M_j instead of drawing it.
  Tuple draw(double given_m = 0.0) {
    Tuple t;
    switch (family_) {
      case Family::Quadratic:
        t.a = rng_.uniform(1, 30);
        t.p1 = rng_.uniform(1, 20);
        t.p2 = rng_.uniform(1, 25);
        t.l = rng_.uniform(0, 3);
        t.u = rng_.uniform_above(3, 11);
        break;
      case Family::StratifiedSampling:
        t.a = rng_.uniform(1, 30);
        t.p1 = given_m > 0.0 ? given_m : rng_.uniform(5, 30);
        t.p2 = rng_.uniform(1, 4);
        t.l = rng_.uniform(1, 3);
        t.u = rng_.uniform_above(3, 15);
        break;
      case Family::Sampling:
        t.a = rng_.uniform(1, 4);
        t.p1 = rng_.uniform(5, 30);
        t.l = std::max(rng_.uniform(0, 3), kSamplingFloor);
        t.u = rng_.uniform_above(3, 6);
        break;
      case Family::TheoryOfSearch:
        t.a = rng_.uniform(1, 3);
        t.p1 = rng_.uniform(0.5, 8);
        t.p2 = rng_.uniform(0.1, 3);
        t.l = rng_.uniform(0, 0.1);
        t.u = rng_.uniform_above(0.1, 5);
        break;
      case Family::NegativeEntropy:
        t.p1 = rng_.uniform(50, 250);
        do {
          t.l = rng_.uniform(20, 100);
          t.u = rng_.uniform_above(30, 210);
        } while (!(t.u > t.l));
        break;
    }
    return t;
  }

 private:
  Family family_;
  Rng& rng_;
};

// Evaluates the closed forms of one tuple through the shared kernels.
template <class K>
class TupleMap {
 public:
  TupleMap(Family family, double population) : family_(family), population_(population) {}

  void bind(const Tuple& t) {
    a_ = t.a;
    l_ = t.l;
    u_ = t.u;
    if (family_ == Family::StratifiedSampling) {
      p_ = t.p1 * t.p2 * t.p2 / (population_ - 1.0);
      has_q_ = false;
    } else {
      p_ = t.p1;
      q_ = t.p2;
      has_q_ = family_ == Family::Quadratic || family_ == Family::TheoryOfSearch;
    }
  }

  double mu_l() const { return detail::breakpoint_at<K>(terms(), 0, l_); }
  double mu_u() const { return detail::breakpoint_at<K>(terms(), 0, u_); }
  double unclamped(double mu) const { return K::interior(terms(), 0, mu); }
  double clamped(double mu) const { return std::clamp(unclamped(mu), l_, u_); }

 private:
  detail::Terms terms() const {
    return detail::Terms{{&a_, 1}, {&p_, 1}, has_q_ ? std::span<const double>(&q_, 1) : std::span<const double>{},
                         {&l_, 1}, {&u_, 1}};
  }

  Family family_;
  double population_;
  double a_ = 1.0, p_ = 0.0, q_ = 0.0, l_ = 0.0, u_ = 0.0;
  bool has_q_ = false;
};

bool holds(Role role, double mu_l, double mu_u, double mu, double gap) {
  switch (role) {
    case Role::Interior: return mu_u < mu - gap && mu + gap < mu_l;
    case Role::Lower: return mu_l <= mu - gap;
    case Role::Upper: return mu_u >= mu + gap;
  }
  return false;
}

// Move the bounds of t by the least amount that makes `role` hold at mu.
template <class K>
void force(Role role, Tuple& t, TupleMap<K>& map, double mu, double gap) {
  const double width = t.u - t.l;
  const double above = map.unclamped(mu - gap);  // x at the larger-x side
  const double below = map.unclamped(mu + gap);
  switch (role) {
    case Role::Lower:
      t.l = above;
      if (!(t.u > t.l)) t.u = t.l + width;
      break;
    case Role::Upper:
      t.u = below;
      if (!(t.u > t.l)) {
        const bool positive = t.l > 0.0;
        t.l = t.u - width;
        if (positive && !(t.l > 0.0)) t.l = 0.5 * t.u;
      }
      break;
    case Role::Interior:
      t.u = std::max(t.u, above);
      t.l = std::min(t.l, below);
      break;
  }
  map.bind(t);
}

template <class K>
ProblemInstance build(const GenSpec& spec, Rng& rng) {
  const std::size_t n = spec.n;
  Drawer drawer(spec.family, rng);
  const bool stratified = spec.family == Family::StratifiedSampling;

  std::vector<double> populations;
  double population = 0.0;
  if (stratified) {
    populations.resize(n);
    for (auto& m : populations) m = rng.uniform(5, 30);
    detail::NeumaierSum total;
    for (double m : populations) total.add(m);
    population = total.value();
  }

  TupleMap<K> map(spec.family, population);
  std::vector<double> mids(kPilot);
  for (double& mid : mids) {
    map.bind(drawer.draw());
    mid = 0.5 * (map.mu_l() + map.mu_u());
  }
  std::nth_element(mids.begin(), mids.begin() + (kPilot - 1) / 2, mids.end());
  const double mu_star = mids[(kPilot - 1) / 2];
  if (K::kPositiveDual && !(mu_star > 0.0)) throw std::runtime_error("pilot median is not positive");
  const double gap = K::kPositiveDual ? 1e-6 * mu_star : 1e-6 * std::max(1.0, std::abs(mu_star));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto interior = static_cast<std::size_t>(std::llround(spec.h_frac * static_cast<double>(n)));
  std::vector<Role> roles(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < interior) {
      roles[order[i]] = Role::Interior;
    } else {
      roles[order[i]] = (i - interior) % 2 == 0 ? Role::Lower : Role::Upper;
    }
  }

  ProblemInstance inst;
  inst.family = spec.family;
  inst.sense = spec.sense;
  inst.a.resize(n);
  inst.p1.resize(n);
  if (spec.family == Family::Quadratic || stratified || spec.family == Family::TheoryOfSearch) {
    inst.p2.resize(n);
  }
  inst.l.resize(n);
  inst.u.resize(n);

  detail::NeumaierSum b;
  for (std::size_t j = 0; j < n; ++j) {
    Tuple t;
    bool ok = false;
    for (int tries = 0; tries < kTries && !ok; ++tries) {
      t = drawer.draw(stratified ? populations[j] : 0.0);
      map.bind(t);
      ok = holds(roles[j], map.mu_l(), map.mu_u(), mu_star, gap);
    }
    if (!ok) {
      force(roles[j], t, map, mu_star, gap);
      if (!holds(roles[j], map.mu_l(), map.mu_u(), mu_star, 0.0)) {
        throw std::runtime_error("could not place index " + std::to_string(j));
      }
    }
    inst.a[j] = t.a;
    inst.p1[j] = t.p1;
    if (!inst.p2.empty()) inst.p2[j] = t.p2;
    inst.l[j] = t.l;
    inst.u[j] = t.u;
    b.add(t.a * map.clamped(mu_star));
  }
  inst.b = b.value();
  validate(inst);
  return inst;
}

}  // namespace

ProblemInstance generate(const GenSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("n must be positive");
  if (!(spec.h_frac >= 0.0 && spec.h_frac <= 1.0)) {
    throw std::invalid_argument("h_frac must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  return detail::with_kernel(spec.family, [&](auto k) { return build<decltype(k)>(spec, rng); });
}

}  // namespace nrap
