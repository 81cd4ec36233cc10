#include "nrap/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nrap/detail/kernels.hpp"
#include "nrap/detail/sum.hpp"

namespace nrap {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Quadratic: return "quadratic";
    case Family::StratifiedSampling: return "stratified";
    case Family::Sampling: return "sampling";
    case Family::TheoryOfSearch: return "search";
    case Family::NegativeEntropy: return "negentropy";
  }
  return "?";
}

std::string_view to_string(Sense sense) { return sense == Sense::Equality ? "eq" : "le"; }

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Approximate: return "approximate";
    case Status::Failed: return "failed";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

Sense parse_sense(std::string_view name) {
  if (name == "eq") return Sense::Equality;
  if (name == "le") return Sense::LessEqual;
  throw std::invalid_argument("unknown sense '" + std::string(name) + "'");
}

Status parse_status(std::string_view name) {
  for (Status s : {Status::Optimal, Status::Approximate, Status::Failed}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown status '" + std::string(name) + "'");
}

bool requires_positive_dual(Family family) {
  return detail::with_kernel(family, [](auto k) { return decltype(k)::kPositiveDual; });
}

namespace {

bool has_second_parameter(Family family) {
  return family == Family::Quadratic || family == Family::StratifiedSampling ||
         family == Family::TheoryOfSearch;
}

[[noreturn]] void invalid(std::size_t j, const char* what) {
  std::ostringstream os;
  os << "index " << j << ": " << what;
  throw std::invalid_argument(os.str());
}

}  // namespace

void validate(const ProblemInstance& inst) {
  const std::size_t n = inst.size();
  if (n == 0) throw std::invalid_argument("instance has no variables");
  if (inst.p1.size() != n || inst.l.size() != n || inst.u.size() != n) {
    throw std::invalid_argument("per-index arrays differ in length");
  }
  if (has_second_parameter(inst.family) ? inst.p2.size() != n : !inst.p2.empty()) {
    throw std::invalid_argument("second parameter array has the wrong length for the family");
  }
  if (!std::isfinite(inst.b)) throw std::invalid_argument("b is not finite");

  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(inst.a[j]) || !std::isfinite(inst.p1[j]) || !std::isfinite(inst.l[j]) ||
        !std::isfinite(inst.u[j]) || (!inst.p2.empty() && !std::isfinite(inst.p2[j]))) {
      invalid(j, "non-finite value");
    }
    if (!(inst.a[j] > 0.0)) invalid(j, "a must be positive");
    if (!(inst.l[j] < inst.u[j])) invalid(j, "l must be below u");
    switch (inst.family) {
      case Family::Quadratic:
        if (!(inst.p1[j] > 0.0)) invalid(j, "w must be positive");
        break;
      case Family::StratifiedSampling:
        if (!(inst.p1[j] > 0.0) || !(inst.p2[j] > 0.0)) invalid(j, "M and rho must be positive");
        if (!(inst.l[j] > 0.0)) invalid(j, "l must be positive");
        break;
      case Family::Sampling:
        if (!(inst.p1[j] > 0.0)) invalid(j, "c must be positive");
        if (inst.l[j] < 0.0) invalid(j, "l must be nonnegative");
        break;
      case Family::TheoryOfSearch:
        if (!(inst.p1[j] > 0.0) || !(inst.p2[j] > 0.0)) invalid(j, "m and b must be positive");
        break;
      case Family::NegativeEntropy:
        if (!(inst.p1[j] > 0.0)) invalid(j, "c must be positive");
        if (!(inst.l[j] > 0.0)) invalid(j, "l must be positive");
        if (inst.a[j] != 1.0) invalid(j, "a must equal 1");
        break;
    }
  }
  if (inst.family == Family::StratifiedSampling &&
      !(std::accumulate(inst.p1.begin(), inst.p1.end(), 0.0) > 1.0)) {
    throw std::invalid_argument("population size must exceed 1");
  }

  detail::NeumaierSum lo, hi;
  for (std::size_t j = 0; j < n; ++j) {
    lo.add(inst.a[j] * inst.l[j]);
    hi.add(inst.a[j] * inst.u[j]);
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(inst.b));
  if (inst.b < lo.value() - slack) throw std::invalid_argument("infeasible: b below sum a l");
  if (inst.sense == Sense::Equality && inst.b > hi.value() + slack) {
    throw std::invalid_argument("infeasible: b above sum a u");
  }
}

namespace detail {

PreparedTerms::PreparedTerms(const ProblemInstance& inst) {
  std::span<const double> p = inst.p1;
  if (inst.family == Family::StratifiedSampling) {
    // phi_j = K_j (M / x - 1) with K_j M = M_j rho_j^2 / (M - 1)
    const double pop = std::accumulate(inst.p1.begin(), inst.p1.end(), 0.0);
    derived_.resize(inst.size());
    for (std::size_t j = 0; j < inst.size(); ++j) {
      derived_[j] = inst.p1[j] * inst.p2[j] * inst.p2[j] / (pop - 1.0);
    }
    p = derived_;
  }
  std::span<const double> q = inst.p2;
  if (inst.family == Family::StratifiedSampling) q = {};
  terms_ = Terms{inst.a, p, q, inst.l, inst.u};
}

}  // namespace detail

double derivative(const ProblemInstance& inst, std::size_t j, double x) {
  const detail::PreparedTerms prepared(inst);
  return detail::with_kernel(inst.family, [&](auto k) {
    return decltype(k)::derivative(prepared.terms(), j, x);
  });
}

double primal_from_dual(const ProblemInstance& inst, double mu, std::size_t j) {
  const detail::PreparedTerms prepared(inst);
  const auto& t = prepared.terms();
  return detail::with_kernel(inst.family, [&](auto k) {
    using K = decltype(k);
    const double mu_l = detail::breakpoint_at<K>(t, j, t.l[j]);
    const double mu_u = detail::breakpoint_at<K>(t, j, t.u[j]);
    if (mu >= mu_l) return t.l[j];
    if (mu <= mu_u) return t.u[j];
    if (K::kPositiveDual && !(mu > 0.0)) {
      throw std::domain_error("interior map requested at a nonpositive dual value");
    }
    return std::clamp(K::interior(t, j, mu), t.l[j], t.u[j]);
  });
}

std::vector<double> primal_vector(const ProblemInstance& inst, double mu) {
  const detail::PreparedTerms prepared(inst);
  const auto& t = prepared.terms();
  std::vector<double> x(inst.size());
  detail::with_kernel(inst.family, [&](auto k) {
    using K = decltype(k);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double mu_l = detail::breakpoint_at<K>(t, j, t.l[j]);
      const double mu_u = detail::breakpoint_at<K>(t, j, t.u[j]);
      if (K::kPositiveDual && mu < mu_l && mu > mu_u && !(mu > 0.0)) {
        throw std::domain_error("interior map requested at a nonpositive dual value");
      }
      x[j] = detail::clamped<K>(t, j, mu, mu_l, mu_u);
    }
  });
  return x;
}

Breakpoints compute_breakpoints(const ProblemInstance& inst) {
  const detail::PreparedTerms prepared(inst);
  const auto& t = prepared.terms();
  Breakpoints bp;
  bp.mu_l.resize(inst.size());
  bp.mu_u.resize(inst.size());
  detail::with_kernel(inst.family, [&](auto k) {
    using K = decltype(k);
    for (std::size_t j = 0; j < inst.size(); ++j) {
      bp.mu_l[j] = detail::breakpoint_at<K>(t, j, t.l[j]);
      bp.mu_u[j] = detail::breakpoint_at<K>(t, j, t.u[j]);
    }
  });
  return bp;
}

double resource_usage(const ProblemInstance& inst, std::span<const double> x) {
  detail::NeumaierSum sum;
  for (std::size_t j = 0; j < x.size(); ++j) sum.add(inst.a[j] * x[j]);
  return sum.value();
}

KktReport kkt_residual(const ProblemInstance& inst, std::span<const double> x, double mu) {
  const detail::PreparedTerms prepared(inst);
  const auto& t = prepared.terms();
  KktReport r;
  constexpr double inf = detail::kInf;

  detail::with_kernel(inst.family, [&](auto k) {
    using K = decltype(k);
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double xj = x[j];
      if (!std::isfinite(xj) || xj < t.l[j] || xj > t.u[j]) {
        worst = inf;
        continue;
      }
      const double width = kBoundaryWidth * (t.u[j] - t.l[j]);
      const double d = K::derivative(t, j, xj);
      const double g = d + mu * t.a[j];
      double defect;
      if (!std::isfinite(g)) {
        // phi' unbounded at the bound itself (Sampling with l = 0).
        const bool at_lower = xj <= t.l[j] + width;
        const bool at_upper = xj >= t.u[j] - width;
        const bool ok = (at_lower && g > 0) || (at_upper && g < 0);
        defect = ok ? 0.0 : inf;
      } else {
        const double s = std::max(1.0, std::abs(d));
        if (xj <= t.l[j] + width) {
          defect = std::max(0.0, -g) / s;
        } else if (xj >= t.u[j] - width) {
          defect = std::max(0.0, g) / s;
        } else {
          defect = std::abs(g) / s;
        }
      }
      worst = std::max(worst, defect);
    }
    r.stationarity_residual = worst;
  });

  const double scale = std::max(1.0, std::abs(inst.b));
  const double excess = resource_usage(inst, x) - inst.b;
  if (inst.sense == Sense::Equality) {
    r.feasibility_residual = std::abs(excess) / scale;
  } else {
    r.feasibility_residual = std::max(0.0, excess) / scale;
    r.complementarity_residual = std::abs(mu * excess) / scale;
    r.sign_violation = std::max(0.0, -mu);
  }
  r.max_residual = std::max({r.feasibility_residual, r.stationarity_residual,
                             r.complementarity_residual, r.sign_violation});
  return r;
}

double eval_objective(const ProblemInstance& inst, std::span<const double> x) {
  const bool positive = inst.family != Family::Quadratic && inst.family != Family::TheoryOfSearch;
  double pop = 0.0;
  if (inst.family == Family::StratifiedSampling) {
    pop = std::accumulate(inst.p1.begin(), inst.p1.end(), 0.0);
  }
  detail::NeumaierSum sum;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    if (positive && !(xj > 0.0)) throw std::domain_error("objective undefined at nonpositive x");
    switch (inst.family) {
      case Family::Quadratic:
        sum.add(0.5 * inst.p1[j] * xj * xj - inst.p2[j] * xj);
        break;
      case Family::StratifiedSampling: {
        const double rho = inst.p2[j];
        sum.add((inst.p1[j] / pop) * (pop - xj) * rho * rho / ((pop - 1.0) * xj));
        break;
      }
      case Family::Sampling:
        sum.add(inst.p1[j] / xj);
        break;
      case Family::TheoryOfSearch:
        sum.add(inst.p1[j] * (std::exp(-inst.p2[j] * xj) - 1.0));
        break;
      case Family::NegativeEntropy:
        sum.add(xj * (std::log(xj / inst.p1[j]) - 1.0));
        break;
    }
  }
  return sum.value();
}

}  // namespace nrap
