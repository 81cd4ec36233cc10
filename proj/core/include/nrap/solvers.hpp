#pragma once

#include <span>
#include <string_view>

#include "nrap/newton_nz.hpp"
#include "nrap/problem.hpp"

namespace nrap {

// Every solver name accepted by run_solver, in a fixed display order:
// mb2 mb3 mb5 pir2 dir2 dir3 dir5 der2 der3 der5 dbr2 dbr3 dbr5 nz oracle.
std::span<const std::string_view> solver_names();
// The thirteen breakpoint and relaxation solvers.
std::span<const std::string_view> exact_solver_names();

bool is_solver(std::string_view name);
// True for solvers that return KKT-optimal points (everything but nz).
bool is_exact(std::string_view name);

// Throws std::invalid_argument for an unknown name.
Solution run_solver(std::string_view name, const ProblemInstance& inst, const NzConfig& nz = {});

}  // namespace nrap
