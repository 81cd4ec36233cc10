#include "nrap/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace nrap {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (sep == ' ') {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i == line.size()) break;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != sep && !(sep == ' ' && line[j] == '\t')) ++j;
    out.push_back(line.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

double real_at(std::size_t line, std::string_view token) {
  try {
    return parse_real(token);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

std::size_t columns(Family family) {
  switch (family) {
    case Family::Sampling:
    case Family::NegativeEntropy:
      return family == Family::Sampling ? 4 : 3;
    default:
      return 5;
  }
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

}  // namespace

std::string format_instance(const ProblemInstance& inst) {
  std::string out = "nrap 1\n";
  out += "family=";
  out += to_string(inst.family);
  out += " n=" + std::to_string(inst.size());
  out += " sense=";
  out += to_string(inst.sense);
  out += " b=" + format_real(inst.b) + "\n";
  for (std::size_t j = 0; j < inst.size(); ++j) {
    std::vector<double> row;
    switch (inst.family) {
      case Family::Quadratic:
      case Family::StratifiedSampling:
      case Family::TheoryOfSearch:
        row = {inst.a[j], inst.p1[j], inst.p2[j], inst.l[j], inst.u[j]};
        break;
      case Family::Sampling:
        row = {inst.a[j], inst.p1[j], inst.l[j], inst.u[j]};
        break;
      case Family::NegativeEntropy:
        row = {inst.p1[j], inst.l[j], inst.u[j]};
        break;
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ' ';
      out += format_real(row[k]);
    }
    out += '\n';
  }
  return out;
}

ProblemInstance parse_instance(std::string_view text) {
  std::vector<std::string_view> lines = split_lines(text);
  while (!lines.empty() && blank(lines.back())) lines.pop_back();
  if (lines.empty()) throw ParseError(1, "empty file");

  const auto magic = split_fields(lines[0], ' ');
  if (magic.size() != 2 || magic[0] != "nrap") throw ParseError(1, "expected 'nrap <version>'");
  if (magic[1] != "1") throw VersionError("unsupported instance format version " + std::string(magic[1]));
  if (lines.size() < 2) throw ParseError(2, "missing parameter line");

  ProblemInstance inst;
  bool seen_family = false, seen_n = false, seen_sense = false, seen_b = false;
  std::size_t n = 0;
  for (std::string_view field : split_fields(lines[1], ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw ParseError(2, "expected key=value, got '" + std::string(field) + "'");
    const std::string_view key = field.substr(0, eq);
    const std::string_view value = field.substr(eq + 1);
    try {
      if (key == "family") {
        inst.family = parse_family(value);
        seen_family = true;
      } else if (key == "n") {
        const auto res = std::from_chars(value.data(), value.data() + value.size(), n);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || n == 0) {
          throw std::invalid_argument("n must be a positive integer");
        }
        seen_n = true;
      } else if (key == "sense") {
        inst.sense = parse_sense(value);
        seen_sense = true;
      } else if (key == "b") {
        inst.b = parse_real(value);
        seen_b = true;
      } else {
        throw std::invalid_argument("unknown key '" + std::string(key) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(2, e.what());
    }
  }
  if (!(seen_family && seen_n && seen_sense && seen_b)) {
    throw ParseError(2, "need family, n, sense and b");
  }

  const std::size_t cols = columns(inst.family);
  const bool two_params = cols == 5;
  inst.a.resize(n);
  inst.p1.resize(n);
  if (two_params) inst.p2.resize(n);
  inst.l.resize(n);
  inst.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t line_no = j + 3;
    if (line_no > lines.size()) {
      throw ParseError(line_no, "expected " + std::to_string(n) + " data rows, found " +
                                    std::to_string(j));
    }
    const auto fields = split_fields(lines[line_no - 1], ' ');
    if (fields.size() != cols) {
      throw ParseError(line_no, "expected " + std::to_string(cols) + " columns, found " +
                                    std::to_string(fields.size()));
    }
    std::size_t k = 0;
    inst.a[j] = inst.family == Family::NegativeEntropy ? 1.0 : real_at(line_no, fields[k++]);
    inst.p1[j] = real_at(line_no, fields[k++]);
    if (two_params) inst.p2[j] = real_at(line_no, fields[k++]);
    inst.l[j] = real_at(line_no, fields[k++]);
    inst.u[j] = real_at(line_no, fields[k++]);
  }
  if (lines.size() > n + 2) throw ParseError(n + 3, "more data rows than n");

  try {
    validate(inst);
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("invalid instance: ") + e.what());
  }
  return inst;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_file(path, format_instance(inst));
}

ProblemInstance read_instance(const std::filesystem::path& path) {
  return parse_instance(read_file(path));
}

std::string format_solution(std::string_view alg, const Solution& sol) {
  std::string out;
  out += "# alg=" + std::string(alg) + "\n";
  out += "# mu=" + format_real(sol.mu) + "\n";
  out += "# status=" + std::string(to_string(sol.status)) + "\n";
  out += "# iters=" + std::to_string(sol.iterations) + "\n";
  out += "j,x\n";
  for (std::size_t j = 0; j < sol.x.size(); ++j) {
    out += std::to_string(j) + "," + format_real(sol.x[j]) + "\n";
  }
  return out;
}

SolutionFile parse_solution(std::string_view text) {
  SolutionFile file;
  bool seen_mu = false, seen_status = false, seen_iters = false, seen_header = false;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (blank(line)) continue;
    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = body.substr(0, eq);
      const std::string_view value = body.substr(eq + 1);
      try {
        if (key == "alg") {
          file.alg = std::string(value);
        } else if (key == "mu") {
          file.solution.mu = parse_real(value);
          seen_mu = true;
        } else if (key == "status") {
          file.solution.status = parse_status(value);
          seen_status = true;
        } else if (key == "iters") {
          std::int64_t it = 0;
          const auto res = std::from_chars(value.data(), value.data() + value.size(), it);
          if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
            throw std::invalid_argument("bad iteration count");
          }
          file.solution.iterations = it;
          seen_iters = true;
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
      continue;
    }
    if (!seen_header && line == "j,x") {
      seen_header = true;
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2) throw ParseError(line_no, "expected 'j,x'");
    std::size_t j = 0;
    const auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), j);
    if (res.ec != std::errc{} || res.ptr != fields[0].data() + fields[0].size()) {
      throw ParseError(line_no, "bad index");
    }
    if (j != file.solution.x.size()) throw ParseError(line_no, "indices must be 0, 1, 2, ... in order");
    file.solution.x.push_back(real_at(line_no, fields[1]));
  }
  if (!(seen_mu && seen_status && seen_iters)) throw ParseError(0, "missing mu, status or iters header");
  return file;
}

void write_solution(std::string_view alg, const Solution& sol, const std::filesystem::path& path) {
  write_file(path, format_solution(alg, sol));
}

SolutionFile read_solution(const std::filesystem::path& path) { return parse_solution(read_file(path)); }

}  // namespace nrap
