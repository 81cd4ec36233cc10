#include <doctest.h>

#include <algorithm>
#include <vector>

#include "nrap/generator.hpp"
#include "nrap/select.hpp"

using nrap::quickselect;
using nrap::quickselect_median;

TEST_CASE("quickselect_median examples") {
  std::vector<double> a{3, 1, 2};
  CHECK(quickselect_median(a) == 2);
  std::vector<double> b{4, 1};
  CHECK(quickselect_median(b) == 1);
  std::vector<double> c{5, 5, 5, 1, 9};
  CHECK(quickselect_median(c) == 5);
  std::vector<double> one{7};
  CHECK(quickselect_median(one) == 7);
  std::vector<double> empty;
  CHECK_THROWS_AS(quickselect_median(empty), std::invalid_argument);
}

TEST_CASE("property: quickselect agrees with sorting") {
  nrap::Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<double> v(n);
    // Few distinct values half of the time, to exercise duplicates.
    const bool coarse = trial % 2 == 0;
    for (double& x : v) x = coarse ? static_cast<double>(rng.below(5)) : rng.uniform(-10, 10);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t k = rng.below(n);
    std::vector<double> work = v;
    CHECK(quickselect(work, k) == sorted[k]);
    std::sort(work.begin(), work.end());
    CHECK(work == sorted);

    work = v;
    CHECK(quickselect_median(work) == sorted[(n + 1) / 2 - 1]);
  }
}
