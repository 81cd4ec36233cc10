#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nrap/newton_nz.hpp"
#include "nrap/problem.hpp"

namespace nrap {

struct BenchRecord {
  Family family = Family::Quadratic;
  std::size_t n = 0;
  double h_frac = 0.0;
  std::uint64_t seed = 0;
  std::string alg;
  int rep = 0;
  std::int64_t time_ns = 0;
  std::int64_t iters = 0;
  Status status = Status::Failed;
  double mu = 0.0;
  double feas_resid = 0.0;  // |sum a_j x_j - b|
  double kkt_resid = 0.0;   // KktReport::max_residual

  bool operator==(const BenchRecord&) const = default;
};

struct BenchMatrix {
  std::vector<Family> families;
  std::vector<std::size_t> sizes;
  std::vector<double> h_fracs;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algs;
};

struct BenchOptions {
  int reps = 1;
  // 0 reads NRAP_THREADS (default 1).
  int threads = 0;
  double kkt_tol = 1e-7;
  NzConfig nz;
  // Called after each finished cell with (done, total); may run on a worker.
  std::function<void(std::size_t, std::size_t)> progress;
};

// A solver returned a point that fails verification; the bench stops.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One record per (cell, alg, rep), sorted by cell, then alg order in the
// matrix, then rep.
std::vector<BenchRecord> run_bench(const BenchMatrix& matrix, const BenchOptions& options = {});

// Worker count from NRAP_THREADS, at least 1.
int thread_count_from_env();

inline constexpr std::string_view kResultsHeader =
    "family,n,h_frac,seed,alg,rep,time_ns,iters,status,mu,feas_resid,kkt_resid";

std::string format_records(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_records(std::string_view csv);

struct ProfilePoint {
  std::string alg;
  double tau = 1.0;
  double rho = 0.0;

  bool operator==(const ProfilePoint&) const = default;
};

inline constexpr std::string_view kProfileHeader = "alg,tau,rho";

// Performance profile over problems (family, n, h_frac, seed). Times are
// averaged over reps; an algorithm that failed any rep of a problem, or has
// no record for it, is charged r_max. Without `taus`, the grid is every
// distinct ratio plus r_max. Without `r_max`, it is 1.05 times the largest
// finite ratio.
std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<double>& taus = {},
                                              std::optional<double> r_max = std::nullopt);

std::string format_profile(const std::vector<ProfilePoint>& points);

// Least-squares slope of log(mean time) against log(n) for one algorithm,
// over its non-failed records. Needs at least three distinct n.
double scaling_fit(const std::vector<BenchRecord>& records, std::string_view alg);

}  // namespace nrap
