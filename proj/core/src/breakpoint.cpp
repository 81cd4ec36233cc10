#include "nrap/breakpoint.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nrap/detail/common.hpp"
#include "nrap/detail/kernels.hpp"
#include "nrap/select.hpp"

namespace nrap {

namespace {

using detail::Aggregate;
using detail::Region;
using detail::Terms;

template <class K, int Sets>
class MedianSearch {
 public:
  MedianSearch(const ProblemInstance& inst, const Terms& t, const BreakpointOptions& options)
      : inst_(inst), t_(t), options_(options), n_(t.size()) {}

  Solution run() {
    Solution sol;
    sol.x.resize(n_);
    x_ = sol.x.data();

    if (inst_.sense == Sense::LessEqual && detail::zero_dual_fits<K>(inst_, t_, sol.x)) {
      sol.mu = 0.0;
      sol.status = Status::Optimal;
      return sol;
    }

    mu_l_.resize(n_);
    mu_u_.resize(n_);
    candidates_.reserve(2 * n_);
    for (std::size_t j = 0; j < n_; ++j) {
      mu_l_[j] = detail::breakpoint_at<K>(t_, j, t_.l[j]);
      mu_u_[j] = detail::breakpoint_at<K>(t_, j, t_.u[j]);
      // An infinite breakpoint can never be the optimal multiplier.
      if (std::isfinite(mu_l_[j])) candidates_.push_back(mu_l_[j]);
      if (std::isfinite(mu_u_[j])) candidates_.push_back(mu_u_[j]);
    }
    free_.resize(n_);
    std::iota(free_.begin(), free_.end(), std::size_t{0});
    bk_ = inst_.b;

    std::int64_t iteration = 0;
    while (!candidates_.empty()) {
      ++iteration;
      const std::size_t before = candidates_.size();
      const double median = quickselect_median(candidates_);
      const Reference ref = reference(median);
      const double bk = bk_;

      if (std::abs(ref.delta - bk_) <= detail::resource_band(bk_)) {
        notify(iteration, median, ref.delta, bk, before, before);
        finish_at(median);
        sol.mu = median;
        sol.iterations = iteration;
        sol.status = Status::Optimal;
        return sol;
      }
      if (ref.delta > bk_) {
        lower_ = median;
        bk_ -= ref.beta_l;
        raise_lower();
        std::erase_if(candidates_, [median](double v) { return !(v > median); });
      } else {
        upper_ = median;
        bk_ -= ref.beta_u;
        lower_upper();
        std::erase_if(candidates_, [median](double v) { return !(v < median); });
      }
      notify(iteration, median, ref.delta, bk, before, candidates_.size());
    }

    sol.iterations = iteration;
    sol.mu = solve_remaining();
    sol.status = Status::Optimal;
    return sol;
  }

 private:
  struct Reference {
    double delta = 0.0;
    double beta_l = 0.0;
    double beta_u = 0.0;
  };

  Reference reference(double mu) const {
    Reference r;
    double interior = 0.0;
    for (std::size_t j : free_) {
      if (mu >= mu_l_[j]) {
        r.beta_l += t_.a[j] * t_.l[j];
      } else if (mu <= mu_u_[j]) {
        r.beta_u += t_.a[j] * t_.u[j];
      } else {
        interior += t_.a[j] * K::interior(t_, j, mu);
      }
    }
    if constexpr (Sets == 5) {
      for (std::size_t j : below_upper_) {
        if (mu >= mu_l_[j]) {
          r.beta_l += t_.a[j] * t_.l[j];
        } else {
          interior += t_.a[j] * K::interior(t_, j, mu);
        }
      }
      for (std::size_t j : above_lower_) {
        if (mu <= mu_u_[j]) {
          r.beta_u += t_.a[j] * t_.u[j];
        } else {
          interior += t_.a[j] * K::interior(t_, j, mu);
        }
      }
    }
    if constexpr (Sets >= 3) {
      if (!interior_.empty()) interior += K::usage(gamma_, mu);
    }
    r.delta = interior + r.beta_l + r.beta_u;
    return r;
  }

  void to_interior(std::size_t j) {
    interior_.push_back(j);
    K::add(gamma_, t_, j);
    if (options_.observer) moved_.push_back(j);
  }

  void peg(std::size_t j, double value, std::vector<std::size_t>& log) {
    x_[j] = value;
    if (options_.observer) log.push_back(j);
  }

  // The bracket's lower end just moved up to lower_.
  void raise_lower() {
    const double lo = lower_;
    const double hi = upper_;
    std::erase_if(free_, [&](std::size_t j) {
      if (mu_l_[j] <= lo) {
        peg(j, t_.l[j], pegged_lower_);
        return true;
      }
      if constexpr (Sets == 3) {
        if (mu_u_[j] <= lo && hi <= mu_l_[j]) {
          to_interior(j);
          return true;
        }
      } else if constexpr (Sets == 5) {
        if (mu_u_[j] <= lo) {
          if (hi <= mu_l_[j]) {
            to_interior(j);
          } else {
            below_upper_.push_back(j);
          }
          return true;
        }
      }
      return false;
    });
    if constexpr (Sets == 5) {
      std::erase_if(below_upper_, [&](std::size_t j) {
        if (mu_l_[j] <= lo) {
          peg(j, t_.l[j], pegged_lower_);
          return true;
        }
        return false;
      });
      std::erase_if(above_lower_, [&](std::size_t j) {
        if (mu_u_[j] <= lo) {
          to_interior(j);
          return true;
        }
        return false;
      });
    }
  }

  // The bracket's upper end just moved down to upper_.
  void lower_upper() {
    const double lo = lower_;
    const double hi = upper_;
    std::erase_if(free_, [&](std::size_t j) {
      if (mu_u_[j] >= hi) {
        peg(j, t_.u[j], pegged_upper_);
        return true;
      }
      if constexpr (Sets == 3) {
        if (mu_u_[j] <= lo && hi <= mu_l_[j]) {
          to_interior(j);
          return true;
        }
      } else if constexpr (Sets == 5) {
        if (hi <= mu_l_[j]) {
          if (mu_u_[j] <= lo) {
            to_interior(j);
          } else {
            above_lower_.push_back(j);
          }
          return true;
        }
      }
      return false;
    });
    if constexpr (Sets == 5) {
      std::erase_if(above_lower_, [&](std::size_t j) {
        if (mu_u_[j] >= hi) {
          peg(j, t_.u[j], pegged_upper_);
          return true;
        }
        return false;
      });
      std::erase_if(below_upper_, [&](std::size_t j) {
        if (hi <= mu_l_[j]) {
          to_interior(j);
          return true;
        }
        return false;
      });
    }
  }

  template <class Fn>
  void for_each_unpegged(Fn&& fn) const {
    for (std::size_t j : free_) fn(j);
    for (std::size_t j : below_upper_) fn(j);
    for (std::size_t j : above_lower_) fn(j);
    for (std::size_t j : interior_) fn(j);
  }

  void finish_at(double mu) {
    for_each_unpegged([&](std::size_t j) {
      x_[j] = detail::clamped<K>(t_, j, mu, mu_l_[j], mu_u_[j]);
    });
  }

  // No breakpoint is left inside the bracket, so every unpegged variable is
  // strictly between its bounds at the optimum.
  double solve_remaining() {
    Aggregate all = gamma_;
    std::size_t count = interior_.size();
    for (std::size_t j : free_) K::add(all, t_, j);
    for (std::size_t j : below_upper_) K::add(all, t_, j);
    for (std::size_t j : above_lower_) K::add(all, t_, j);
    count += free_.size() + below_upper_.size() + above_lower_.size();
    if (count == 0) return detail::bracket_point(lower_, upper_);
    const double mu = K::solve(all, bk_);
    for_each_unpegged([&](std::size_t j) {
      x_[j] = std::clamp(K::interior(t_, j, mu), t_.l[j], t_.u[j]);
    });
    return mu;
  }

  void notify(std::int64_t iteration, double median, double delta, double bk, std::size_t before,
              std::size_t after) {
    if (!options_.observer) return;
    BreakpointIteration it;
    it.iteration = iteration;
    it.median = median;
    it.delta = delta;
    it.bk = bk;
    it.lower = lower_;
    it.upper = upper_;
    it.candidates_before = before;
    it.candidates_after = after;
    it.pegged_lower = pegged_lower_;
    it.pegged_upper = pegged_upper_;
    it.moved_interior = moved_;
    options_.observer(it);
    pegged_lower_.clear();
    pegged_upper_.clear();
    moved_.clear();
  }

  const ProblemInstance& inst_;
  const Terms& t_;
  const BreakpointOptions& options_;
  std::size_t n_;
  double* x_ = nullptr;

  std::vector<double> mu_l_, mu_u_, candidates_;
  std::vector<std::size_t> free_, below_upper_, above_lower_, interior_;
  Aggregate gamma_;
  double bk_ = 0.0;
  double lower_ = -detail::kInf;
  double upper_ = detail::kInf;

  std::vector<std::size_t> pegged_lower_, pegged_upper_, moved_;
};

template <int Sets>
Solution run_variant(const ProblemInstance& inst, const BreakpointOptions& options) {
  const detail::PreparedTerms prepared(inst);
  return detail::with_kernel(inst.family, [&](auto k) {
    return MedianSearch<decltype(k), Sets>(inst, prepared.terms(), options).run();
  });
}

}  // namespace

Solution solve_breakpoint(const ProblemInstance& inst, BreakpointVariant variant,
                          const BreakpointOptions& options) {
  const detail::Stopwatch clock;
  Solution sol;
  try {
    switch (variant) {
      case BreakpointVariant::MB2: sol = run_variant<2>(inst, options); break;
      case BreakpointVariant::MB3: sol = run_variant<3>(inst, options); break;
      case BreakpointVariant::MB5: sol = run_variant<5>(inst, options); break;
    }
  } catch (const std::domain_error&) {
    sol = Solution{};
    sol.x.assign(inst.size(), 0.0);
  }
  sol.elapsed = clock.elapsed();
  return sol;
}

double interior_solve(const ProblemInstance& inst, std::span<const std::size_t> free, double bk) {
  if (free.empty()) throw std::domain_error("interior solve over an empty set");
  const detail::PreparedTerms prepared(inst);
  return detail::with_kernel(inst.family, [&](auto k) {
    using K = decltype(k);
    Aggregate agg;
    for (std::size_t j : free) K::add(agg, prepared.terms(), j);
    return K::solve(agg, bk);
  });
}

}  // namespace nrap
