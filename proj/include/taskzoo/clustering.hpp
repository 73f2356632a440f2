// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "taskzoo/kernel_alignment.hpp"

namespace taskzoo {

struct Merge {
  std::size_t left = 0;   // smaller node id
  std::size_t right = 0;  // larger node id
  double height = 0.0;
  std::size_t size = 0;   // leaves under the new node
};

// Nodes 0..n-1 are leaves; merge k creates node n+k.
struct Dendrogram {
  std::vector<Merge> merges;
  std::vector<std::string> leaf_ids;

  std::size_t leaves() const { return leaf_ids.size(); }
};

// Ward minimum-variance agglomeration of the rows of kappa under Euclidean
// distance. Heights follow the usual sqrt-of-criterion convention. Equal
// heights merge the lexicographically smallest (left, right) pair first.
Dendrogram ward_linkage(const TaskCovariance& kappa);

// Flat clusters joining leaves connected through merges of height <=
// threshold. Labels are 0.. in order of each cluster's smallest leaf.
std::vector<std::size_t> cut_dendrogram(const Dendrogram& d, double threshold);

// {"leaf_ids": [...], "merges": [{"left", "right", "height", "size"}, ...]}
// plus "clusters" and "threshold" when labels are given.
std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::size_t>* labels = nullptr,
                               double threshold = 0.0);
std::string dendrogram_to_newick(const Dendrogram& d);

}  // namespace taskzoo
