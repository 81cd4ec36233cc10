#include "nrap/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "nrap/detail/common.hpp"
#include "nrap/generator.hpp"
#include "nrap/io.hpp"
#include "nrap/solvers.hpp"

namespace nrap {

int thread_count_from_env() {
  const char* env = std::getenv("NRAP_THREADS");
  if (!env || !*env) return 1;
  int n = 1;
  const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), n);
  if (res.ec != std::errc{} || n < 1) return 1;
  return n;
}

namespace {

struct Cell {
  Family family;
  std::size_t n;
  double h_frac;
  std::uint64_t seed;
};

std::string describe(const Cell& c, std::string_view alg) {
  return std::string(alg) + " on " + std::string(to_string(c.family)) + " n=" + std::to_string(c.n) +
         " h=" + format_real(c.h_frac) + " seed=" + std::to_string(c.seed);
}

void check(const ProblemInstance& inst, const Cell& cell, std::string_view alg, const Solution& sol,
           const KktReport& kkt, const BenchOptions& options) {
  if (sol.status == Status::Failed) {
    if (is_exact(alg)) throw VerificationError(describe(cell, alg) + ": solver failed");
    return;
  }
  if (sol.status == Status::Optimal) {
    if (!kkt.passes(options.kkt_tol)) {
      throw VerificationError(describe(cell, alg) + ": KKT residual " + format_real(kkt.max_residual));
    }
    return;
  }
  const double rel = std::abs(resource_usage(inst, sol.x) / inst.b - 1.0);
  bool in_bounds = true;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    in_bounds = in_bounds && sol.x[j] >= inst.l[j] && sol.x[j] <= inst.u[j];
  }
  if (!(rel < options.nz.eps) || !in_bounds) {
    throw VerificationError(describe(cell, alg) + ": approximate point misses the stopping criterion");
  }
}

std::vector<BenchRecord> run_cell(const Cell& cell, const BenchMatrix& matrix, const BenchOptions& options) {
  const ProblemInstance inst = generate({cell.family, cell.n, cell.h_frac, cell.seed, Sense::Equality});
  std::vector<BenchRecord> out;
  for (const std::string& alg : matrix.algs) {
    (void)run_solver(alg, inst, options.nz);
    for (int rep = 0; rep < options.reps; ++rep) {
      const detail::Stopwatch clock;
      const Solution sol = run_solver(alg, inst, options.nz);
      const auto elapsed = clock.elapsed();
      const KktReport kkt = kkt_residual(inst, sol.x, sol.mu);
      check(inst, cell, alg, sol, kkt, options);

      BenchRecord r;
      r.family = cell.family;
      r.n = cell.n;
      r.h_frac = cell.h_frac;
      r.seed = cell.seed;
      r.alg = alg;
      r.rep = rep;
      r.time_ns = std::max<std::int64_t>(1, elapsed.count());
      r.iters = sol.iterations;
      r.status = sol.status;
      r.mu = sol.mu;
      r.feas_resid = std::abs(resource_usage(inst, sol.x) - inst.b);
      r.kkt_resid = kkt.max_residual;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchMatrix& matrix, const BenchOptions& options) {
  if (matrix.algs.empty()) throw std::invalid_argument("no algorithms to benchmark");
  if (matrix.families.empty() || matrix.sizes.empty() || matrix.h_fracs.empty() || matrix.seeds.empty()) {
    throw std::invalid_argument("benchmark matrix is empty");
  }
  if (options.reps < 1) throw std::invalid_argument("reps must be positive");
  for (const auto& alg : matrix.algs) {
    if (!is_solver(alg)) throw std::invalid_argument("unknown solver '" + alg + "'");
  }

  std::vector<Cell> cells;
  for (Family f : matrix.families)
    for (std::size_t n : matrix.sizes)
      for (double h : matrix.h_fracs)
        for (std::uint64_t s : matrix.seeds) cells.push_back({f, n, h, s});

  std::vector<std::vector<BenchRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || stop.load()) return;
      try {
        results[i] = run_cell(cells[i], matrix, options);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) options.progress(finished, cells.size());
    }
  };

  const int threads = std::max(1, options.threads > 0 ? options.threads : thread_count_from_env());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<BenchRecord> records;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(records));
  return records;
}

std::string format_records(const std::vector<BenchRecord>& records) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const BenchRecord& r : records) {
    out += to_string(r.family);
    out += ',' + std::to_string(r.n);
    out += ',' + format_real(r.h_frac);
    out += ',' + std::to_string(r.seed);
    out += ',' + r.alg;
    out += ',' + std::to_string(r.rep);
    out += ',' + std::to_string(r.time_ns);
    out += ',' + std::to_string(r.iters);
    out += ',';
    out += to_string(r.status);
    out += ',' + format_real(r.mu);
    out += ',' + format_real(r.feas_resid);
    out += ',' + format_real(r.kkt_resid);
    out += '\n';
  }
  return out;
}

namespace {

template <class Int>
Int parse_int(std::string_view s, std::size_t line) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_csv_real(std::string_view s, std::size_t line) {
  try {
    return parse_real(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace

std::vector<BenchRecord> parse_records(std::string_view csv) {
  std::vector<BenchRecord> records;
  std::size_t line_no = 0;
  bool header = false;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kResultsHeader) throw ParseError(line_no, "unexpected results header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 12) throw ParseError(line_no, "expected 12 columns");
    BenchRecord r;
    try {
      r.family = parse_family(f[0]);
      r.status = parse_status(f[8]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    r.n = parse_int<std::size_t>(f[1], line_no);
    r.h_frac = parse_csv_real(f[2], line_no);
    r.seed = parse_int<std::uint64_t>(f[3], line_no);
    r.alg = std::string(f[4]);
    r.rep = parse_int<int>(f[5], line_no);
    r.time_ns = parse_int<std::int64_t>(f[6], line_no);
    r.iters = parse_int<std::int64_t>(f[7], line_no);
    r.mu = parse_csv_real(f[9], line_no);
    r.feas_resid = parse_csv_real(f[10], line_no);
    r.kkt_resid = parse_csv_real(f[11], line_no);
    records.push_back(std::move(r));
  }
  if (!header) throw ParseError(1, "missing results header");
  return records;
}

namespace {

using ProblemKey = std::tuple<int, std::size_t, double, std::uint64_t>;

struct Timing {
  double total = 0.0;
  int count = 0;
  bool failed = false;
};

}  // namespace

std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<double>& taus,
                                              std::optional<double> r_max) {
  if (records.empty()) throw std::invalid_argument("no records to profile");
  std::vector<std::string> algs;
  std::map<ProblemKey, std::map<std::string, Timing>> table;
  for (const BenchRecord& r : records) {
    if (std::find(algs.begin(), algs.end(), r.alg) == algs.end()) algs.push_back(r.alg);
    Timing& t = table[{static_cast<int>(r.family), r.n, r.h_frac, r.seed}][r.alg];
    if (r.status == Status::Failed) {
      t.failed = true;
    } else {
      t.total += static_cast<double>(r.time_ns);
      ++t.count;
    }
  }

  // ratios[alg][problem]; NaN marks a failure.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, std::vector<double>> ratios;
  double largest = 1.0;
  for (const auto& [key, per_alg] : table) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [alg, t] : per_alg) {
      if (!t.failed && t.count) best = std::min(best, t.total / t.count);
    }
    for (const std::string& alg : algs) {
      const auto it = per_alg.find(alg);
      double r = nan;
      if (it != per_alg.end() && !it->second.failed && it->second.count) {
        r = (it->second.total / it->second.count) / best;
        largest = std::max(largest, r);
      }
      ratios[alg].push_back(r);
    }
  }
  const double cap = r_max.value_or(1.05 * largest);

  std::vector<double> grid = taus;
  if (grid.empty()) {
    for (const auto& [alg, rs] : ratios) {
      for (double r : rs) {
        if (!std::isnan(r)) grid.push_back(r);
      }
    }
    grid.push_back(cap);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  const double problems = static_cast<double>(table.size());
  std::vector<ProfilePoint> out;
  for (const std::string& alg : algs) {
    std::vector<double> solved;
    for (double r : ratios[alg]) {
      if (!std::isnan(r)) solved.push_back(r);
    }
    std::sort(solved.begin(), solved.end());
    for (double tau : grid) {
      const auto count = std::upper_bound(solved.begin(), solved.end(), tau) - solved.begin();
      out.push_back({alg, tau, static_cast<double>(count) / problems});
    }
  }
  return out;
}

std::string format_profile(const std::vector<ProfilePoint>& points) {
  std::string out(kProfileHeader);
  out += '\n';
  for (const ProfilePoint& p : points) {
    out += p.alg + ',' + format_real(p.tau) + ',' + format_real(p.rho) + '\n';
  }
  return out;
}

double scaling_fit(const std::vector<BenchRecord>& records, std::string_view alg) {
  std::map<std::size_t, Timing> by_n;
  for (const BenchRecord& r : records) {
    if (r.alg != alg || r.status == Status::Failed) continue;
    Timing& t = by_n[r.n];
    t.total += static_cast<double>(r.time_ns);
    ++t.count;
  }
  if (by_n.size() < 3) throw std::invalid_argument("scaling fit needs at least three distinct n");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(by_n.size());
  for (const auto& [n, t] : by_n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(t.total / t.count);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace nrap
