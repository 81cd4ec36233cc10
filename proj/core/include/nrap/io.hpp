#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nrap/problem.hpp"

namespace nrap {

// Malformed input; line() is 1-based, 0 when no single line is to blame.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest-safe binary64 round trip: 17 significant digits, "%.17g" style.
std::string format_real(double v);
// Whole-token decimal parse; throws std::invalid_argument on junk.
double parse_real(std::string_view text);

std::string format_instance(const ProblemInstance& inst);
ProblemInstance parse_instance(std::string_view text);
void write_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance read_instance(const std::filesystem::path& path);

struct SolutionFile {
  std::string alg;
  Solution solution;
};

std::string format_solution(std::string_view alg, const Solution& sol);
SolutionFile parse_solution(std::string_view text);
void write_solution(std::string_view alg, const Solution& sol, const std::filesystem::path& path);
SolutionFile read_solution(const std::filesystem::path& path);

// Whole file as a string; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace nrap
