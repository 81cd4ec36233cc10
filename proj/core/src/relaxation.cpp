#include "nrap/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nrap/detail/common.hpp"
#include "nrap/detail/kernels.hpp"

namespace nrap {

using detail::Aggregate;
using detail::Terms;

void Evaluation::clear() {
  lower.clear();
  upper.clear();
  beta_l = beta_u = excess = deficit = delta = 0.0;
  has_implicit = has_explicit = false;
}

Decision implicit_decision(const Evaluation& ev, double bk) {
  const double band = detail::resource_band(bk);
  const double diff = ev.excess - ev.deficit;
  if (diff > band && !ev.upper.empty()) return Decision::PegUpper;
  if (diff < -band && !ev.lower.empty()) return Decision::PegLower;
  return Decision::Stop;
}

Decision explicit_decision(const Evaluation& ev, double bk) {
  const double band = detail::resource_band(bk);
  const double diff = ev.delta - bk;
  if (diff > band && !ev.lower.empty()) return Decision::PegLower;
  if (diff < -band && !ev.upper.empty()) return Decision::PegUpper;
  return Decision::Stop;
}

namespace {

enum Mark : unsigned char { kNone = 0, kInLower = 1, kInUpper = 2, kPegged = 3 };

}  // namespace

struct RelaxState::Impl {
  Impl(const ProblemInstance& inst, Pegging pegging, bool with_breakpoints)
      : inst(inst),
        prepared(inst),
        t(prepared.terms()),
        pegging(pegging),
        with_breakpoints(with_breakpoints),
        x(inst.size()),
        mark(inst.size(), kNone),
        bk(inst.b) {
    free.resize(inst.size());
    std::iota(free.begin(), free.end(), std::size_t{0});
  }
  virtual ~Impl() = default;

  virtual double relaxed_dual() const = 0;
  virtual double relaxed_scale() const = 0;
  virtual double dual_of_scale(double theta) const = 0;
  virtual double relaxed_value(std::size_t j, double theta) const = 0;
  virtual void classify_dual(double mu_hat, Evaluation& ev) const = 0;
  virtual void classify_primal(double theta, Evaluation& ev) const = 0;
  virtual void implicit_evaluate(double mu_hat, Evaluation& ev) const = 0;
  virtual void explicit_evaluate(double mu_hat, Evaluation& ev) const = 0;
  virtual void peg(const Evaluation& ev, double mu_hat, bool to_lower) = 0;
  virtual void finish(const Evaluation& ev, double mu) = 0;
  virtual bool try_zero_dual() = 0;
  virtual double aggregate_drift() const = 0;

  template <class Fn>
  void for_each_unpegged(Fn&& fn) const {
    for (std::size_t j : free) fn(j);
    for (std::size_t j : below_upper) fn(j);
    for (std::size_t j : above_lower) fn(j);
    for (std::size_t j : interior) fn(j);
  }

  std::size_t unpegged() const {
    return free.size() + below_upper.size() + above_lower.size() + interior.size();
  }

  const ProblemInstance& inst;
  detail::PreparedTerms prepared;
  const Terms& t;
  Pegging pegging;
  bool with_breakpoints;

  std::vector<double> x;
  std::vector<double> mu_l, mu_u;
  // N, L- (known below the upper bound), U+ (known above the lower bound), M.
  std::vector<std::size_t> free, below_upper, above_lower, interior;
  mutable std::vector<unsigned char> mark;
  Aggregate all, gamma;
  double bk;
  double lower = -detail::kInf;
  double upper = detail::kInf;
};

namespace {

template <class K>
struct KernelState final : RelaxState::Impl {
  KernelState(const ProblemInstance& inst, Pegging pegging, bool with_breakpoints)
      : Impl(inst, pegging, with_breakpoints) {
    const std::size_t n = inst.size();
    if (with_breakpoints) {
      mu_l.resize(n);
      mu_u.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        mu_l[j] = detail::breakpoint_at<K>(t, j, t.l[j]);
        mu_u[j] = detail::breakpoint_at<K>(t, j, t.u[j]);
      }
    }
    for (std::size_t j = 0; j < n; ++j) K::add(all, t, j);
  }

  double relaxed_dual() const override { return K::solve(all, bk); }
  double relaxed_scale() const override { return K::scale(all, bk); }
  double dual_of_scale(double theta) const override { return K::mu_of_scale(theta); }
  double relaxed_value(std::size_t j, double theta) const override {
    return K::from_scale(t, j, theta);
  }

  void classify_dual(double mu_hat, Evaluation& ev) const override {
    for (std::size_t j : free) {
      if (mu_hat >= mu_l[j]) {
        add_lower(ev, j);
      } else if (mu_hat <= mu_u[j]) {
        add_upper(ev, j);
      } else {
        mark[j] = kNone;
      }
    }
    for (std::size_t j : below_upper) {
      if (mu_hat >= mu_l[j]) {
        add_lower(ev, j);
      } else {
        mark[j] = kNone;
      }
    }
    for (std::size_t j : above_lower) {
      if (mu_hat <= mu_u[j]) {
        add_upper(ev, j);
      } else {
        mark[j] = kNone;
      }
    }
  }

  void classify_primal(double theta, Evaluation& ev) const override {
    if (!below_upper.empty() || !above_lower.empty() || !interior.empty()) {
      throw std::logic_error("primal determination keeps only two pegging sets");
    }
    for (std::size_t j : free) {
      const double xh = K::from_scale(t, j, theta);
      if (xh <= t.l[j]) {
        add_lower(ev, j);
        ev.deficit += t.a[j] * (t.l[j] - xh);
      } else if (xh >= t.u[j]) {
        add_upper(ev, j);
        ev.excess += t.a[j] * (xh - t.u[j]);
      } else {
        mark[j] = kNone;
      }
    }
    ev.has_implicit = true;
  }

  void implicit_evaluate(double mu_hat, Evaluation& ev) const override {
    double deficit = 0.0;
    for (std::size_t j : ev.lower) deficit += t.a[j] * (t.l[j] - K::interior(t, j, mu_hat));
    double excess = 0.0;
    for (std::size_t j : ev.upper) excess += t.a[j] * (K::interior(t, j, mu_hat) - t.u[j]);
    ev.deficit = deficit;
    ev.excess = excess;
    ev.has_implicit = true;
  }

  void explicit_evaluate(double mu_hat, Evaluation& ev) const override {
    double sum = 0.0;
    auto visit = [&](const std::vector<std::size_t>& set) {
      for (std::size_t j : set) {
        if (mark[j] == kNone) sum += t.a[j] * K::interior(t, j, mu_hat);
      }
    };
    visit(free);
    visit(below_upper);
    visit(above_lower);
    if (!interior.empty()) sum += K::usage(gamma, mu_hat);
    ev.delta = sum + ev.beta_l + ev.beta_u;
    ev.has_explicit = true;
  }

  void peg(const Evaluation& ev, double mu_hat, bool to_lower) override {
    const auto& chosen = to_lower ? ev.lower : ev.upper;
    for (std::size_t j : chosen) {
      x[j] = to_lower ? t.l[j] : t.u[j];
      mark[j] = kPegged;
    }
    bk -= to_lower ? ev.beta_l : ev.beta_u;
    if (to_lower) {
      lower = mu_hat;
    } else {
      upper = mu_hat;
    }

    const std::size_t remaining = unpegged() - chosen.size();
    if (chosen.size() < remaining) {
      for (std::size_t j : chosen) K::remove(all, t, j);
    }

    const bool pegged_from_upper_side = !to_lower;
    auto is_pegged = [this](std::size_t j) { return mark[j] == kPegged; };
    switch (pegging) {
      case Pegging::TwoSets:
        std::erase_if(free, is_pegged);
        break;
      case Pegging::ThreeSets:
        transfer_three();
        break;
      case Pegging::FiveSets:
        transfer_five(pegged_from_upper_side);
        break;
    }

    if (chosen.size() >= remaining) {
      all = Aggregate{};
      for_each_unpegged([&](std::size_t j) { K::add(all, t, j); });
    }
  }

  void finish(const Evaluation& ev, double mu) override {
    for (std::size_t j : ev.lower) x[j] = t.l[j];
    for (std::size_t j : ev.upper) x[j] = t.u[j];
    auto settle = [&](const std::vector<std::size_t>& set, bool check_mark) {
      for (std::size_t j : set) {
        if (check_mark && mark[j] != kNone) continue;
        x[j] = std::clamp(K::interior(t, j, mu), t.l[j], t.u[j]);
      }
    };
    settle(free, true);
    settle(below_upper, true);
    settle(above_lower, true);
    settle(interior, false);
  }

  bool try_zero_dual() override {
    if (with_breakpoints) {
      double used = 0.0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        x[j] = detail::clamped<K>(t, j, 0.0, mu_l[j], mu_u[j]);
        used += t.a[j] * x[j];
      }
      return used <= inst.b + detail::resource_band(inst.b);
    }
    return detail::zero_dual_fits<K>(inst, t, x);
  }

  double aggregate_drift() const override {
    Aggregate fresh, fresh_gamma;
    for_each_unpegged([&](std::size_t j) { K::add(fresh, t, j); });
    for (std::size_t j : interior) K::add(fresh_gamma, t, j);
    auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max(1.0, std::abs(want));
    };
    return std::max({rel(all.s1, fresh.s1), rel(all.s2, fresh.s2), rel(gamma.s1, fresh_gamma.s1),
                     rel(gamma.s2, fresh_gamma.s2)});
  }

 private:
  void add_lower(Evaluation& ev, std::size_t j) const {
    ev.lower.push_back(j);
    ev.beta_l += t.a[j] * t.l[j];
    mark[j] = kInLower;
  }
  void add_upper(Evaluation& ev, std::size_t j) const {
    ev.upper.push_back(j);
    ev.beta_u += t.a[j] * t.u[j];
    mark[j] = kInUpper;
  }

  void to_interior(std::size_t j) {
    interior.push_back(j);
    K::add(gamma, t, j);
  }

  bool both_sides_known(std::size_t j) const { return mu_u[j] <= lower && upper <= mu_l[j]; }

  void transfer_three() {
    std::erase_if(free, [&](std::size_t j) {
      if (mark[j] == kPegged) return true;
      if (both_sides_known(j)) {
        to_interior(j);
        return true;
      }
      return false;
    });
  }

  // Moving the upper end of the bracket can only prove "above lower"; moving
  // the lower end can only prove "below upper".
  void transfer_five(bool upper_moved) {
    std::erase_if(free, [&](std::size_t j) {
      if (mark[j] == kPegged) return true;
      const bool below = mu_u[j] <= lower;
      const bool above = upper <= mu_l[j];
      if (below && above) {
        to_interior(j);
        return true;
      }
      if (below) {
        below_upper.push_back(j);
        return true;
      }
      if (above) {
        above_lower.push_back(j);
        return true;
      }
      return false;
    });
    if (upper_moved) {
      std::erase_if(above_lower, [&](std::size_t j) { return mark[j] == kPegged; });
      std::erase_if(below_upper, [&](std::size_t j) {
        if (upper <= mu_l[j]) {
          to_interior(j);
          return true;
        }
        return false;
      });
    } else {
      std::erase_if(below_upper, [&](std::size_t j) { return mark[j] == kPegged; });
      std::erase_if(above_lower, [&](std::size_t j) {
        if (mu_u[j] <= lower) {
          to_interior(j);
          return true;
        }
        return false;
      });
    }
  }
};

std::unique_ptr<RelaxState::Impl> make_state(const ProblemInstance& inst, Pegging pegging,
                                             bool with_breakpoints) {
  if (pegging != Pegging::TwoSets && !with_breakpoints) {
    throw std::invalid_argument("3- and 5-set pegging need breakpoints");
  }
  return detail::with_kernel(inst.family, [&](auto k) -> std::unique_ptr<RelaxState::Impl> {
    return std::make_unique<KernelState<decltype(k)>>(inst, pegging, with_breakpoints);
  });
}

}  // namespace

RelaxState::RelaxState(const ProblemInstance& inst, Pegging pegging, bool with_breakpoints)
    : impl_(make_state(inst, pegging, with_breakpoints)) {}
RelaxState::~RelaxState() = default;
RelaxState::RelaxState(RelaxState&&) noexcept = default;
RelaxState& RelaxState::operator=(RelaxState&&) noexcept = default;

double RelaxState::relaxed_dual() const { return impl_->relaxed_dual(); }
double RelaxState::relaxed_scale() const { return impl_->relaxed_scale(); }
double RelaxState::dual_of_scale(double theta) const { return impl_->dual_of_scale(theta); }

std::vector<double> RelaxState::relaxed_primal() const {
  const double theta = impl_->relaxed_scale();
  std::vector<double> out;
  out.reserve(impl_->unpegged());
  impl_->for_each_unpegged([&](std::size_t j) { out.push_back(impl_->relaxed_value(j, theta)); });
  return out;
}

void RelaxState::classify_dual(double mu_hat, Evaluation& ev) const {
  if (!impl_->with_breakpoints) throw std::logic_error("dual classification needs breakpoints");
  impl_->classify_dual(mu_hat, ev);
}
void RelaxState::classify_primal(double theta, Evaluation& ev) const {
  impl_->classify_primal(theta, ev);
}
void RelaxState::implicit_evaluate(double mu_hat, Evaluation& ev) const {
  impl_->implicit_evaluate(mu_hat, ev);
}
void RelaxState::explicit_evaluate(double mu_hat, Evaluation& ev) const {
  impl_->explicit_evaluate(mu_hat, ev);
}
void RelaxState::peg_lower(const Evaluation& ev, double mu_hat) { impl_->peg(ev, mu_hat, true); }
void RelaxState::peg_upper(const Evaluation& ev, double mu_hat) { impl_->peg(ev, mu_hat, false); }
void RelaxState::finish(const Evaluation& ev, double mu) { impl_->finish(ev, mu); }
bool RelaxState::try_zero_dual() { return impl_->try_zero_dual(); }

std::vector<std::size_t> RelaxState::free_indices() const {
  std::vector<std::size_t> out;
  out.reserve(impl_->unpegged());
  impl_->for_each_unpegged([&](std::size_t j) { out.push_back(j); });
  return out;
}
std::size_t RelaxState::free_count() const { return impl_->unpegged(); }
double RelaxState::bk() const { return impl_->bk; }
double RelaxState::lower() const { return impl_->lower; }
double RelaxState::upper() const { return impl_->upper; }
const std::vector<double>& RelaxState::x() const { return impl_->x; }
std::vector<double> RelaxState::take_x() { return std::move(impl_->x); }
double RelaxState::aggregate_drift() const { return impl_->aggregate_drift(); }

namespace {

enum class Determination { Primal, Dual };
enum class Evaluate { Implicit, Explicit, Blended };

struct VariantTraits {
  Determination determination;
  Evaluate evaluate;
  Pegging pegging;
};

VariantTraits traits_of(RelaxVariant v) {
  using D = Determination;
  using E = Evaluate;
  using P = Pegging;
  switch (v) {
    case RelaxVariant::PIR2: return {D::Primal, E::Implicit, P::TwoSets};
    case RelaxVariant::DIR2: return {D::Dual, E::Implicit, P::TwoSets};
    case RelaxVariant::DIR3: return {D::Dual, E::Implicit, P::ThreeSets};
    case RelaxVariant::DIR5: return {D::Dual, E::Implicit, P::FiveSets};
    case RelaxVariant::DER2: return {D::Dual, E::Explicit, P::TwoSets};
    case RelaxVariant::DER3: return {D::Dual, E::Explicit, P::ThreeSets};
    case RelaxVariant::DER5: return {D::Dual, E::Explicit, P::FiveSets};
    case RelaxVariant::DBR2: return {D::Dual, E::Blended, P::TwoSets};
    case RelaxVariant::DBR3: return {D::Dual, E::Blended, P::ThreeSets};
    case RelaxVariant::DBR5: return {D::Dual, E::Blended, P::FiveSets};
  }
  throw std::logic_error("unknown relaxation variant");
}

Solution run(const ProblemInstance& inst, RelaxVariant variant, const RelaxOptions& options) {
  const VariantTraits tr = traits_of(variant);
  const bool primal = tr.determination == Determination::Primal;
  RelaxState state(inst, tr.pegging, !primal);
  Solution sol;

  if (inst.sense == Sense::LessEqual && state.try_zero_dual()) {
    sol.x = state.take_x();
    sol.mu = 0.0;
    sol.status = Status::Optimal;
    return sol;
  }

  Evaluation ev;
  const std::int64_t cap = static_cast<std::int64_t>(inst.size()) + 2;
  for (std::int64_t iteration = 1; iteration <= cap; ++iteration) {
    if (state.free_count() == 0) {
      sol.iterations = iteration - 1;
      sol.mu = detail::bracket_point(state.lower(), state.upper());
      sol.status = Status::Optimal;
      sol.x = state.take_x();
      return sol;
    }

    ev.clear();
    double mu_hat = 0.0;
    if (primal) {
      const double theta = state.relaxed_scale();
      mu_hat = state.dual_of_scale(theta);
      state.classify_primal(theta, ev);
    } else {
      mu_hat = state.relaxed_dual();
      state.classify_dual(mu_hat, ev);
    }

    const std::size_t free_count = state.free_count();
    bool use_explicit = tr.evaluate == Evaluate::Explicit;
    if (tr.evaluate == Evaluate::Blended) {
      use_explicit = free_count < 2 * (ev.lower.size() + ev.upper.size());
    }
    if (!ev.has_implicit && (!use_explicit || options.evaluate_both)) {
      state.implicit_evaluate(mu_hat, ev);
    }
    if (use_explicit || options.evaluate_both) state.explicit_evaluate(mu_hat, ev);

    const double bk = state.bk();
    const Decision decision = use_explicit ? explicit_decision(ev, bk) : implicit_decision(ev, bk);

    if (options.observer) {
      RelaxIteration it;
      it.iteration = iteration;
      it.mu_hat = mu_hat;
      it.bk = bk;
      it.lower = state.lower();
      it.upper = state.upper();
      it.free_count = free_count;
      it.used_explicit = use_explicit;
      it.decision = decision;
      it.evaluation = &ev;
      it.state = &state;
      options.observer(it);
    }

    switch (decision) {
      case Decision::Stop:
        state.finish(ev, mu_hat);
        sol.iterations = iteration;
        sol.mu = mu_hat;
        sol.status = Status::Optimal;
        sol.x = state.take_x();
        return sol;
      case Decision::PegLower:
        state.peg_lower(ev, mu_hat);
        break;
      case Decision::PegUpper:
        state.peg_upper(ev, mu_hat);
        break;
    }
  }

  sol.iterations = cap;
  sol.status = Status::Failed;
  sol.x = state.take_x();
  return sol;
}

}  // namespace

Solution solve_relaxation(const ProblemInstance& inst, RelaxVariant variant,
                          const RelaxOptions& options) {
  const detail::Stopwatch clock;
  Solution sol;
  try {
    sol = run(inst, variant, options);
  } catch (const std::domain_error&) {
    sol = Solution{};
    sol.x.assign(inst.size(), 0.0);
    sol.status = Status::Failed;
  }
  sol.elapsed = clock.elapsed();
  return sol;
}

}  // namespace nrap
