// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <set>

#include "taskzoo/clustering.hpp"
#include "taskzoo/error.hpp"
#include "taskzoo/json_io.hpp"
#include "../test_support.hpp"

using namespace taskzoo;

namespace {

TaskCovariance block() {
  Eigen::MatrixXd m(4, 4);
  m << 1.0, 0.9, 0.0, 0.0,
       0.9, 1.0, 0.0, 0.0,
       0.0, 0.0, 1.0, 0.9,
       0.0, 0.0, 0.9, 1.0;
  return TaskCovariance::from_matrix(m, {"a", "b", "c", "d"});
}

// Partition as a set of leaf-id sets, independent of label numbering.
std::set<std::set<std::string>> partition(const std::vector<std::size_t>& labels,
                                          const std::vector<std::string>& ids) {
  std::map<std::size_t, std::set<std::string>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].insert(ids[i]);
  std::set<std::set<std::string>> out;
  for (auto& [_, g] : groups) out.insert(g);
  return out;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("Ward linkage on a two-block covariance") {
  const Dendrogram d = ward_linkage(block());
  REQUIRE(d.merges.size() == 3);
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[0].height == doctest::Approx(0.14142136).epsilon(1e-7));
  CHECK(d.merges[1].left == 2);
  CHECK(d.merges[1].right == 3);
  CHECK(d.merges[2].left == 4);
  CHECK(d.merges[2].right == 5);
  CHECK(d.merges[2].height == doctest::Approx(2.68700577).epsilon(1e-7));
  CHECK(d.merges[2].size == 4);

  CHECK(cut_dendrogram(d, 0.9) == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(cut_dendrogram(d, 0.0) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(cut_dendrogram(d, 10.0) == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("identity ties merge the lowest node ids first") {
  const Dendrogram d = ward_linkage(TaskCovariance::identity({"x", "y", "z"}));
  REQUIRE(d.merges.size() == 2);
  CHECK(d.merges[0].left == 0);
  CHECK(d.merges[0].right == 1);
  CHECK(d.merges[0].height == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d.merges[1].left == 2);
  CHECK(d.merges[1].right == 3);
}

TEST_CASE("heights are nondecreasing on random covariances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dendrogram d = ward_linkage(taskzoo::testing::random_kappa(12, seed));
    for (std::size_t k = 1; k < d.merges.size(); ++k)
      CHECK(d.merges[k].height >= d.merges[k - 1].height - 1e-9);
  }
}

TEST_CASE("permuting tasks permutes the clusters") {
  const TaskCovariance k = taskzoo::testing::random_kappa(9, 17);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(2);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd pm(9, 9);
  std::vector<std::string> pids;
  for (std::size_t i = 0; i < 9; ++i) {
    pids.push_back(k.ids[perm[i]]);
    for (std::size_t j = 0; j < 9; ++j)
      pm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(perm[i], perm[j]);
  }
  const Dendrogram a = ward_linkage(k);
  const Dendrogram b = ward_linkage(TaskCovariance::from_matrix(pm, pids));
  for (std::size_t s = 0; s < a.merges.size(); ++s)
    CHECK(a.merges[s].height == doctest::Approx(b.merges[s].height).epsilon(1e-10));
  for (double t : {0.2, 0.5, 1.0, 2.0}) CHECK(partition(cut_dendrogram(a, t), k.ids) == partition(cut_dendrogram(b, t), pids));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ward_linkage(TaskCovariance::identity({"solo"})), Error);
}

TEST_CASE("serialized forms") {
  const Dendrogram d = ward_linkage(block());
  const auto labels = cut_dendrogram(d, 0.9);
  const Json doc = Json::parse(dendrogram_to_json(d, &labels, 0.9));
  CHECK(doc["merges"].size() == 3);
  CHECK(doc.dump().find("\"clusters\"") != std::string::npos);
  const std::string nw = dendrogram_to_newick(d);
  CHECK(nw.substr(nw.size() - 2) == ";\n");
  for (const char* id : {"a", "b", "c", "d"}) CHECK(nw.find(id) != std::string::npos);

  const Dendrogram q = ward_linkage(TaskCovariance::identity({"has space", "b(1)"}));
  const std::string qn = dendrogram_to_newick(q);
  CHECK(qn.find("'has space'") != std::string::npos);
  CHECK(qn.find("'b(1)'") != std::string::npos);
}

}  // TEST_SUITE
