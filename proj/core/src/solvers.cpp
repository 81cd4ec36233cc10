#include "nrap/solvers.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "nrap/breakpoint.hpp"
#include "nrap/oracle.hpp"
#include "nrap/relaxation.hpp"

namespace nrap {

namespace {

constexpr std::array<std::string_view, 15> kNames = {
    "mb2", "mb3", "mb5", "pir2", "dir2", "dir3", "dir5", "der2",
    "der3", "der5", "dbr2", "dbr3", "dbr5", "nz", "oracle"};

struct Relax {
  std::string_view name;
  RelaxVariant variant;
};

constexpr std::array<Relax, 10> kRelax = {{{"pir2", RelaxVariant::PIR2},
                                           {"dir2", RelaxVariant::DIR2},
                                           {"dir3", RelaxVariant::DIR3},
                                           {"dir5", RelaxVariant::DIR5},
                                           {"der2", RelaxVariant::DER2},
                                           {"der3", RelaxVariant::DER3},
                                           {"der5", RelaxVariant::DER5},
                                           {"dbr2", RelaxVariant::DBR2},
                                           {"dbr3", RelaxVariant::DBR3},
                                           {"dbr5", RelaxVariant::DBR5}}};

}  // namespace

std::span<const std::string_view> solver_names() { return kNames; }

std::span<const std::string_view> exact_solver_names() { return std::span(kNames).first(13); }

bool is_solver(std::string_view name) {
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

bool is_exact(std::string_view name) { return is_solver(name) && name != "nz"; }

Solution run_solver(std::string_view name, const ProblemInstance& inst, const NzConfig& nz) {
  if (name == "mb2") return solve_breakpoint(inst, BreakpointVariant::MB2);
  if (name == "mb3") return solve_breakpoint(inst, BreakpointVariant::MB3);
  if (name == "mb5") return solve_breakpoint(inst, BreakpointVariant::MB5);
  for (const Relax& r : kRelax) {
    if (r.name == name) return solve_relaxation(inst, r.variant);
  }
  if (name == "nz") return solve_nz(inst, nz).solution;
  if (name == "oracle") return bisection_solve(inst);
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

}  // namespace nrap
