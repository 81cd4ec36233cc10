// nrap: command-line front end for the resource allocation solvers.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nrap/bench.hpp"
#include "nrap/generator.hpp"
#include "nrap/io.hpp"
#include "nrap/oracle.hpp"
#include "nrap/solvers.hpp"

namespace {

int cmd_gen(const std::string& family, std::size_t n, double h_frac, std::uint64_t seed,
            const std::string& sense, const std::string& out) {
  nrap::GenSpec spec;
  spec.family = nrap::parse_family(family);
  spec.n = n;
  spec.h_frac = h_frac;
  spec.seed = seed;
  spec.sense = nrap::parse_sense(sense);
  nrap::write_instance(nrap::generate(spec), out);
  return 0;
}

int cmd_solve(const std::string& alg, const std::string& in, double tol, const std::string& out) {
  const nrap::ProblemInstance inst = nrap::read_instance(in);
  const nrap::Solution sol = nrap::run_solver(alg, inst);
  nrap::write_solution(alg, sol, out);
  const nrap::KktReport kkt = nrap::kkt_residual(inst, sol.x, sol.mu);
  std::cout << "status=" << nrap::to_string(sol.status) << " mu=" << nrap::format_real(sol.mu)
            << " iters=" << sol.iterations << " time_ns=" << sol.elapsed.count()
            << " kkt=" << nrap::format_real(kkt.max_residual) << '\n';
  if (sol.status == nrap::Status::Failed) return 1;
  if (sol.status == nrap::Status::Optimal && !kkt.passes(tol)) {
    std::cerr << "warning: KKT residual above " << nrap::format_real(tol) << '\n';
    return 1;
  }
  return 0;
}

int cmd_verify(const std::string& in, const std::string& sol_path, double tol) {
  const nrap::ProblemInstance inst = nrap::read_instance(in);
  const nrap::SolutionFile file = nrap::read_solution(sol_path);
  const nrap::KktReport r = nrap::verify(inst, file.solution);
  std::cout << "feasibility_residual=" << nrap::format_real(r.feasibility_residual) << '\n'
            << "stationarity_residual=" << nrap::format_real(r.stationarity_residual) << '\n'
            << "complementarity_residual=" << nrap::format_real(r.complementarity_residual) << '\n'
            << "sign_violation=" << nrap::format_real(r.sign_violation) << '\n'
            << "max_residual=" << nrap::format_real(r.max_residual) << '\n';
  const bool ok = r.passes(tol);
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_bench(const nrap::BenchMatrix& matrix, int reps, const std::string& out) {
  nrap::BenchOptions options;
  options.reps = reps;
  options.progress = [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r%zu/%zu cells", done, total);
    if (done == total) std::fputc('\n', stderr);
  };
  const auto records = nrap::run_bench(matrix, options);
  nrap::write_file(out, nrap::format_records(records));
  return 0;
}

int cmd_profile(const std::string& in, const std::string& out, std::optional<double> r_max) {
  const auto records = nrap::parse_records(nrap::read_file(in));
  nrap::write_file(out, nrap::format_profile(nrap::performance_profile(records, {}, r_max)));
  return 0;
}

int cmd_scaling(const std::string& in, const std::string& alg) {
  const auto records = nrap::parse_records(nrap::read_file(in));
  std::cout << nrap::format_real(nrap::scaling_fit(records, alg)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable convex resource allocation solvers"};
  app.require_subcommand(1);

  std::string family, sense = "eq", out, in, alg, sol_path;
  std::size_t n = 0;
  double h_frac = 0.5;
  std::uint64_t seed = 0;
  double solve_tol = 1e-8;
  double verify_tol = 1e-7;
  int reps = 1;
  std::optional<double> r_max;
  std::vector<std::string> families, algs;
  std::vector<std::size_t> sizes;
  std::vector<double> h_fracs;
  std::vector<std::uint64_t> seeds;

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--family", family, "quadratic|stratified|sampling|search|negentropy")->required();
  gen->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  gen->add_option("--h-frac", h_frac, "fraction of variables strictly inside their bounds")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", seed)->required();
  gen->add_option("--sense", sense)->check(CLI::IsMember({"eq", "le"}));
  gen->add_option("--out", out)->required();

  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("--alg", alg)->required()->check([](const std::string& s) {
    return nrap::is_solver(s) ? std::string() : "unknown solver '" + s + "'";
  });
  solve->add_option("--in", in)->required()->check(CLI::ExistingFile);
  solve->add_option("--tol", solve_tol);
  solve->add_option("--out", out)->required();

  auto* verify = app.add_subcommand("verify", "Check a solution against the KKT conditions");
  verify->add_option("--in", in)->required()->check(CLI::ExistingFile);
  verify->add_option("--sol", sol_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", verify_tol);

  auto* bench = app.add_subcommand("bench", "Time solvers over an instance matrix");
  bench->add_option("--algs", algs)->required()->delimiter(',');
  bench->add_option("--families", families)->required()->delimiter(',');
  bench->add_option("--sizes", sizes)->required()->delimiter(',');
  bench->add_option("--h-fracs", h_fracs)->required()->delimiter(',');
  bench->add_option("--seeds", seeds)->required()->delimiter(',');
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber);
  bench->add_option("--out", out)->required();

  auto* profile = app.add_subcommand("profile", "Performance profile of a results file");
  profile->add_option("--in", in)->required()->check(CLI::ExistingFile);
  profile->add_option("--out", out)->required();
  profile->add_option("--r-max", r_max);

  auto* scaling = app.add_subcommand("scaling", "Log-log slope of time against n");
  scaling->add_option("--in", in)->required()->check(CLI::ExistingFile);
  scaling->add_option("--alg", alg)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(family, n, h_frac, seed, sense, out);
    if (*solve) return cmd_solve(alg, in, solve_tol, out);
    if (*verify) return cmd_verify(in, sol_path, verify_tol);
    if (*bench) {
      nrap::BenchMatrix matrix;
      for (const auto& f : families) matrix.families.push_back(nrap::parse_family(f));
      matrix.sizes = sizes;
      matrix.h_fracs = h_fracs;
      matrix.seeds = seeds;
      matrix.algs = algs;
      return cmd_bench(matrix, reps, out);
    }
    if (*profile) return cmd_profile(in, out, r_max);
    if (*scaling) return cmd_scaling(in, alg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
