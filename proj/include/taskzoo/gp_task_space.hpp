// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "taskzoo/kernel_alignment.hpp"

namespace taskzoo {

// Checkpoint indices in insertion order, no duplicates.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> members);
  explicit IndexSet(std::vector<std::size_t> members);

  bool contains(std::size_t i) const;
  void insert(std::size_t i);
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<std::size_t>& members() const { return members_; }

  // Indices of [0, n) not in this set (and not `also_excluded`, if given),
  // ascending.
  IndexSet complement(std::size_t n) const;
  IndexSet complement(std::size_t n, std::size_t also_excluded) const;

  // Throws InvalidArgument if any member is >= n.
  void check_bounds(std::size_t n) const;

 private:
  std::vector<std::size_t> members_;
};

struct GainValue {
  std::size_t index = 0;
  double delta = 0.0;  // nats
  double numerator_variance = 1.0;
  double denominator_variance = 1.0;
};

inline constexpr double kVarianceFloor = 1e-12;

// Posterior variance of task i given tasks S: 1 - k(i,S) k(S,S)^-1 k(S,i),
// clamped to [1e-12, 1]. Empty S gives the unit prior variance.
double conditional_variance(const TaskCovariance& kappa, std::size_t i, const IndexSet& selected);

// Gain in I(S; Z-S) from adding i to S:
//   0.5 * ln( var(i | S) / var(i | Z - S - {i}) ).
GainValue information_gain(const TaskCovariance& kappa, std::size_t i, const IndexSet& selected);

// I(S; Z-S) = 0.5 (logdet k(S,S) + logdet k(Z-S,Z-S) - logdet k). Zero when
// S or its complement is empty.
double mutual_information(const TaskCovariance& kappa, const IndexSet& selected);

// KL( N(0, reference) || N(0, estimate) ).
double gaussian_kl(const TaskCovariance& reference, const TaskCovariance& estimate);

// Cosine between the flattened matrices.
double vec_cosine(const TaskCovariance& a, const TaskCovariance& b);

}  // namespace taskzoo
