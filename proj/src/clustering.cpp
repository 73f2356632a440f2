// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "taskzoo/error.hpp"
#include "taskzoo/json_io.hpp"

namespace taskzoo {
namespace {

constexpr double kHeightTolerance = 1e-12;

std::string newick_label(const std::string& id) {
  if (id.find_first_of(" ()[]':;,") == std::string::npos && !id.empty()) return id;
  std::string out = "'";
  for (char c : id) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

Dendrogram ward_linkage(const TaskCovariance& kappa) {
  const std::size_t n = kappa.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "clustering needs at least two checkpoints");

  // Squared Euclidean distances between active clusters, keyed by slot. Slot
  // k starts as leaf k and is reused for the merged node.
  Eigen::MatrixXd d2(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (kappa.values.row(static_cast<Eigen::Index>(i)) -
           kappa.values.row(static_cast<Eigen::Index>(j)))
              .squaredNorm();

  std::vector<std::size_t> node(n), size(n, 1);
  std::iota(node.begin(), node.end(), 0);
  std::vector<bool> active(n, true);

  Dendrogram out;
  out.leaf_ids = kappa.ids;
  double previous = 0.0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bs = 0, bt = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_ids{SIZE_MAX, SIZE_MAX};
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      for (std::size_t t = s + 1; t < n; ++t) {
        if (!active[t]) continue;
        const double v = d2(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
        const std::pair<std::size_t, std::size_t> ids{std::min(node[s], node[t]),
                                                      std::max(node[s], node[t])};
        if (v < best - kHeightTolerance ||
            (std::abs(v - best) <= kHeightTolerance && ids < best_ids)) {
          best = v;
          bs = s;
          bt = t;
          best_ids = ids;
        }
      }
    }

    double height = std::sqrt(std::max(best, 0.0));
    if (height < previous - 1e-9)
      throw Error(Errc::InvariantViolation, "Ward merge heights decreased");
    height = std::max(height, previous);
    previous = height;

    const std::size_t ns = size[bs], nt = size[bt];
    out.merges.push_back({best_ids.first, best_ids.second, height, ns + nt});

    // Lance-Williams update for Ward on squared distances.
    const auto is = static_cast<Eigen::Index>(bs), it = static_cast<Eigen::Index>(bt);
    for (std::size_t v = 0; v < n; ++v) {
      if (!active[v] || v == bs || v == bt) continue;
      const auto iv = static_cast<Eigen::Index>(v);
      const double nv = static_cast<double>(size[v]);
      const double total = static_cast<double>(ns + nt) + nv;
      const double upd = ((nv + ns) * d2(iv, is) + (nv + nt) * d2(iv, it) - nv * d2(is, it)) / total;
      d2(iv, is) = d2(is, iv) = upd;
    }
    active[bt] = false;
    size[bs] = ns + nt;
    node[bs] = n + step;
  }
  return out;
}

std::vector<std::size_t> cut_dendrogram(const Dendrogram& d, double threshold) {
  if (threshold < 0.0) throw Error(Errc::InvalidArgument, "threshold must be nonnegative");
  const std::size_t n = d.leaves();
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const auto& m = d.merges[k];
    if (m.height <= threshold) {
      parent[find(m.left)] = n + k;
      parent[find(m.right)] = n + k;
    }
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(2 * n, SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const std::size_t r = find(leaf);
    if (root_label[r] == SIZE_MAX) root_label[r] = next++;
    labels[leaf] = root_label[r];
  }
  return labels;
}

std::string dendrogram_to_json(const Dendrogram& d, const std::vector<std::size_t>* labels,
                               double threshold) {
  Json merges = Json::array();
  for (const auto& m : d.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  Json doc{{"leaf_ids", d.leaf_ids}, {"merges", merges}};
  if (labels) {
    doc["clusters"] = *labels;
    doc["threshold"] = threshold;
  }
  return dump_canonical(doc);
}

std::string dendrogram_to_newick(const Dendrogram& d) {
  const std::size_t n = d.leaves();
  if (n == 1) return newick_label(d.leaf_ids[0]) + ";\n";
  const auto height_of = [&](std::size_t node) { return node < n ? 0.0 : d.merges[node - n].height; };
  const std::function<std::string(std::size_t)> render = [&](std::size_t node) -> std::string {
    if (node < n) return newick_label(d.leaf_ids[node]);
    const auto& m = d.merges[node - n];
    return "(" + render(m.left) + ":" + format_double(m.height - height_of(m.left)) + "," +
           render(m.right) + ":" + format_double(m.height - height_of(m.right)) + ")";
  };
  return render(2 * n - 2) + ";\n";
}

}  // namespace taskzoo
