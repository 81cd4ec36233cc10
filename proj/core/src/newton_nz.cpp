#include "nrap/newton_nz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nrap/detail/common.hpp"
#include "nrap/detail/kernels.hpp"

namespace nrap {

namespace {

using detail::kInf;
using detail::Terms;

enum class Envelope { None, UpperOnly, LowerOnly };

template <class K>
double unclamped_at(const Terms& t, std::size_t j, double mu) {
  if constexpr (K::kPositiveDual) {
    if (!(mu > 0.0)) throw std::domain_error("dual value outside the family's domain");
  }
  return K::interior(t, j, mu);
}

template <class K>
double residual(const Terms& t, double b, double mu, Envelope env) {
  double used = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double v = unclamped_at<K>(t, j, mu);
    double x = v;
    if (env != Envelope::LowerOnly) x = std::min(x, t.u[j]);
    if (env != Envelope::UpperOnly) x = std::max(x, t.l[j]);
    used += t.a[j] * x;
  }
  return b - used;
}

struct Probe {
  double psi;
  double slope;  // derivative of the envelope matching the sign of psi
};

// One pass over the terms: Psi(mu) and the slope of Psi+ (Psi > 0) or Psi-
// (Psi <= 0), taken from the interior side at kinks.
template <class K>
Probe probe(const Terms& t, double b, double mu) {
  double used = 0.0;
  double slope_below_upper = 0.0;
  double slope_above_lower = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double v = unclamped_at<K>(t, j, mu);
    const double a = t.a[j];
    used += a * std::clamp(v, t.l[j], t.u[j]);
    const double dx = a * K::interior_slope(t, j, mu);
    if (v < t.u[j]) slope_below_upper -= dx;
    if (v > t.l[j]) slope_above_lower -= dx;
  }
  const double psi = b - used;
  return {psi, psi > 0.0 ? slope_below_upper : slope_above_lower};
}

double relative_residual(double psi, double b) { return std::abs(psi / b); }

// Known sign change of Psi: Psi(neg) < 0 < Psi(pos), so the root lies
// between them.
struct Bracket {
  double neg = -kInf;
  double pos = kInf;

  void record(double mu, double psi) {
    if (psi < 0.0) neg = std::max(neg, mu);
    if (psi > 0.0) pos = std::min(pos, mu);
  }
};

template <class K>
double fallback(double mu, double psi, const Bracket& br, double& stride) {
  if (std::isfinite(br.neg) && std::isfinite(br.pos)) return 0.5 * (br.neg + br.pos);
  // Psi > 0 means the root is at a smaller mu.
  const bool down = psi > 0.0;
  if constexpr (K::kPositiveDual) {
    if (down && std::isfinite(br.neg)) return 0.5 * (br.neg + mu);
    if (!down && std::isfinite(br.pos)) return 0.5 * (mu + br.pos);
    return down ? mu / 4.0 : mu * 4.0;
  } else {
    const double next = down ? mu - stride : mu + stride;
    stride *= 2.0;
    return next;
  }
}

template <class K>
double next_iterate(double mu, const Probe& p, const Bracket& br, double& stride) {
  bool usable = p.slope > 0.0 && std::isfinite(p.slope);
  double next = usable ? mu - p.psi / p.slope : mu;
  if (!std::isfinite(next)) usable = false;
  if constexpr (K::kPositiveDual) {
    if (!(next > 0.0)) usable = false;
  }
  return usable ? next : fallback<K>(mu, p.psi, br, stride);
}

template <class K>
std::vector<double> starts(const Terms& t) {
  double all = 0.0, lower = 0.0, upper = 0.0;
  std::size_t n_all = 0, n_lower = 0, n_upper = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double ml = detail::breakpoint_at<K>(t, j, t.l[j]);
    const double mu = detail::breakpoint_at<K>(t, j, t.u[j]);
    if (std::isfinite(ml)) {
      all += ml;
      lower += ml;
      ++n_all;
      ++n_lower;
    }
    if (std::isfinite(mu)) {
      all += mu;
      upper += mu;
      ++n_all;
      ++n_upper;
    }
  }
  std::vector<double> out;
  if (n_all) out.push_back(all / static_cast<double>(n_all));
  if (n_lower) out.push_back(lower / static_cast<double>(n_lower));
  if (n_upper) out.push_back(upper / static_cast<double>(n_upper));
  return out;
}

template <class K>
NzResult run(const ProblemInstance& inst, const Terms& t, const NzConfig& cfg) {
  NzResult res;
  Solution& sol = res.solution;
  NzTrace& trace = res.trace;
  sol.x.resize(t.size());

  auto finalize = [&](double mu, Status status) {
    sol.mu = mu;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double ml = detail::breakpoint_at<K>(t, j, t.l[j]);
      const double mu_u = detail::breakpoint_at<K>(t, j, t.u[j]);
      sol.x[j] = detail::clamped<K>(t, j, mu, ml, mu_u);
    }
    sol.status = status;
    trace.status = status;
    sol.iterations = trace.iterations;
  };

  if (inst.sense == Sense::LessEqual && detail::zero_dual_fits<K>(inst, t, sol.x)) {
    sol.mu = 0.0;
    sol.status = trace.status = Status::Approximate;
    return res;
  }

  const detail::Stopwatch total;
  const std::vector<double> start_points = starts<K>(t);
  double last_mu = start_points.empty() ? 0.0 : start_points.front();
  trace.final_relative_residual = kInf;

  for (std::size_t s = 0; s < start_points.size(); ++s) {
    if (total.elapsed() >= cfg.total_time_cap) break;
    trace.restarts = static_cast<int>(s);
    const detail::Stopwatch clock;
    double mu = start_points[s];
    Bracket br;
    double stride = std::max(1.0, std::abs(mu));
    for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
      ++trace.iterations;
      const Probe p = probe<K>(t, inst.b, mu);
      trace.final_relative_residual = relative_residual(p.psi, inst.b);
      last_mu = mu;
      if (trace.final_relative_residual < cfg.eps) {
        finalize(mu, Status::Approximate);
        return res;
      }
      br.record(mu, p.psi);
      mu = next_iterate<K>(mu, p, br, stride);
      if ((k & 63) == 63 &&
          (clock.elapsed() >= cfg.per_start_time_cap || total.elapsed() >= cfg.total_time_cap)) {
        break;
      }
    }
  }
  finalize(last_mu, Status::Failed);
  return res;
}

template <class Fn>
decltype(auto) dispatch(const ProblemInstance& inst, Fn&& fn) {
  const detail::PreparedTerms prepared(inst);
  return detail::with_kernel(inst.family, [&](auto k) { return fn(k, prepared.terms()); });
}

}  // namespace

double psi(const ProblemInstance& inst, double mu) {
  return dispatch(inst, [&](auto k, const Terms& t) {
    using K = decltype(k);
    double used = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double ml = detail::breakpoint_at<K>(t, j, t.l[j]);
      const double mu_u = detail::breakpoint_at<K>(t, j, t.u[j]);
      if (K::kPositiveDual && mu < ml && mu > mu_u && !(mu > 0.0)) {
        throw std::domain_error("dual value outside the family's domain");
      }
      used += t.a[j] * detail::clamped<K>(t, j, mu, ml, mu_u);
    }
    return inst.b - used;
  });
}

double psi_plus(const ProblemInstance& inst, double mu) {
  return dispatch(inst, [&](auto k, const Terms& t) {
    return residual<decltype(k)>(t, inst.b, mu, Envelope::UpperOnly);
  });
}

double psi_minus(const ProblemInstance& inst, double mu) {
  return dispatch(inst, [&](auto k, const Terms& t) {
    return residual<decltype(k)>(t, inst.b, mu, Envelope::LowerOnly);
  });
}

NzStep nz_step(const ProblemInstance& inst, double mu, const NzConfig& cfg) {
  return dispatch(inst, [&](auto k, const Terms& t) {
    using K = decltype(k);
    const Probe p = probe<K>(t, inst.b, mu);
    if (relative_residual(p.psi, inst.b) < cfg.eps) return NzStep{true, mu};
    Bracket br;
    double stride = std::max(1.0, std::abs(mu));
    return NzStep{false, next_iterate<K>(mu, p, br, stride)};
  });
}

NzResult solve_nz(const ProblemInstance& inst, const NzConfig& cfg) {
  if (!(cfg.eps > 0.0) || cfg.max_iters < 1) throw std::invalid_argument("bad NZ config");
  const detail::Stopwatch clock;
  NzResult res;
  try {
    res = dispatch(inst, [&](auto k, const Terms& t) { return run<decltype(k)>(inst, t, cfg); });
  } catch (const std::domain_error&) {
    res = NzResult{};
    res.solution.x.assign(inst.size(), 0.0);
  }
  res.solution.elapsed = clock.elapsed();
  return res;
}

}  // namespace nrap
