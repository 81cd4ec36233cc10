#include <doctest.h>

#include <cmath>
#include <limits>

#include "nrap/generator.hpp"
#include "nrap/io.hpp"
#include "support.hpp"

using namespace nrap;

TEST_CASE("real formatting round-trips") {
  for (double v : {0.0, -0.0, 1.0, 0.1, -2.5e-300, 1.7976931348623157e308, 4.9e-324}) {
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK(std::isinf(parse_real(format_real(std::numeric_limits<double>::infinity()))));
  CHECK(std::isnan(parse_real(format_real(std::numeric_limits<double>::quiet_NaN()))));
  CHECK_THROWS_AS(parse_real("1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real(""), std::invalid_argument);
}

TEST_CASE("instance header and rows") {
  const std::string text = format_instance(test::q_peg2());
  CHECK(text.rfind("nrap 1\n", 0) == 0);
  CHECK(text.find("family=quadratic n=3 sense=eq b=4") != std::string::npos);
  CHECK(parse_instance(text) == test::q_peg2());
}

TEST_CASE("malformed instances") {
  CHECK_THROWS_AS(parse_instance("nrap 2\nfamily=quadratic n=1 sense=eq b=1\n1 1 0 0 2\n"), VersionError);

  const std::string short_file = "nrap 1\nfamily=quadratic n=3 sense=eq b=1\n1 1 0 0 2\n1 1 0 0 2\n";
  try {
    parse_instance(short_file);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }

  try {
    parse_instance("nrap 1\nfamily=quadratic n=1 sense=eq b=1\n1 1 0 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(parse_instance("nrap 1\nfamily=cubic n=1 sense=eq b=1\n1 1 0 0 2\n"), ParseError);
}

TEST_CASE("solution files") {
  Solution sol;
  sol.x = {2, 2, 0};
  sol.mu = 1;
  sol.status = Status::Optimal;
  sol.iterations = 2;
  const std::string text = format_solution("dir2", sol);
  CHECK(text.rfind("# alg=dir2\n", 0) == 0);
  const SolutionFile back = parse_solution(text);
  CHECK(back.alg == "dir2");
  CHECK(back.solution.x == sol.x);
  CHECK(back.solution.mu == sol.mu);
  CHECK(back.solution.status == sol.status);
  CHECK(back.solution.iterations == sol.iterations);
}

TEST_CASE("property: generated instances round-trip bit for bit") {
  Rng rng(67);
  for (Family family : kAllFamilies) {
    for (int trial = 0; trial < 20; ++trial) {
      const ProblemInstance inst = generate({family, 1 + rng.below(100), rng.uniform(), rng.next(),
                                            trial % 3 ? Sense::Equality : Sense::LessEqual});
      const std::string text = format_instance(inst);
      const ProblemInstance back = parse_instance(text);
      CHECK(back == inst);
      CHECK(format_instance(back) == text);
    }
  }
}
