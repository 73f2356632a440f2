// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "taskzoo/error.hpp"
#include "taskzoo/robustness.hpp"
#include "taskzoo/synthetic_bench.hpp"

using namespace taskzoo;

TEST_SUITE("robustness") {

TEST_CASE("nested schedule sizes double and subsets are nested") {
  const auto s = nested_schedule(1000, 4, 9);
  REQUIRE(s.size() == 4);
  CHECK(s[0].size() == 125);
  CHECK(s[1].size() == 250);
  CHECK(s[2].size() == 500);
  CHECK(s[3].size() == 1000);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(std::is_sorted(s[k].begin(), s[k].end()));
    if (k > 0) CHECK(std::includes(s[k].begin(), s[k].end(), s[k - 1].begin(), s[k - 1].end()));
  }
  CHECK(nested_schedule(1000, 4, 9) == s);
  CHECK(nested_schedule(1000, 4, 10) != s);
}

TEST_CASE("small totals still give strictly growing sizes") {
  const auto s = nested_schedule(8, 8, 0);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(s[k].size() == k + 1);
  try {
    nested_schedule(5, 8, 0);
    FAIL("expected BadSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadSchedule);
  }
  CHECK_THROWS_AS(nested_schedule(10, 0, 0), Error);
}

TEST_CASE("convergence curve ends at zero divergence") {
  const ValidatedZoo zoo = random_zoo(6, 400, 8, 1);
  const auto sched = nested_schedule(zoo.count(), 5, 2);
  const ConvergenceReport r = convergence_curve(zoo, sched);
  REQUIRE(r.sizes.size() == 6);
  CHECK(r.sizes[0] == 0);
  CHECK(r.sizes.back() == 400);
  CHECK(r.kl.back() <= 1e-9);
  CHECK(r.cosine.back() >= 1.0 - 1e-9);
  CHECK(r.kl[0] > r.kl.back());
  const ConvergenceReport par = convergence_curve(zoo, sched, {false, 3});
  CHECK(par.kl == r.kl);
  CHECK(convergence_to_csv(r, true).rfind("size,kl\n", 0) == 0);
  CHECK(convergence_to_csv(r, false).rfind("size,cosine\n", 0) == 0);
}

TEST_CASE("comparing against another zoo uses it as the reference") {
  const ValidatedZoo zoo = random_zoo(5, 300, 6, 3);
  const ValidatedZoo other = random_zoo(5, 300, 6, 4);
  const ConvergenceReport r = convergence_curve(zoo, nested_schedule(300, 3, 0), {}, &other);
  CHECK(r.kl.back() > 1e-6);
}

TEST_CASE("non-nested schedules are rejected") {
  const ValidatedZoo zoo = random_zoo(3, 50, 4, 0);
  std::vector<std::vector<Eigen::Index>> bad{{0, 1, 2}, {3, 4, 5, 6}};
  try {
    convergence_curve(zoo, bad);
    FAIL("expected BadSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadSchedule);
  }
}

}  // TEST_SUITE
