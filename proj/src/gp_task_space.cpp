// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/gp_task_space.hpp"

#include <algorithm>
#include <cmath>

#include "taskzoo/error.hpp"
#include "taskzoo/linalg.hpp"

namespace taskzoo {

IndexSet::IndexSet(std::initializer_list<std::size_t> members) {
  for (auto i : members) insert(i);
}

IndexSet::IndexSet(std::vector<std::size_t> members) {
  for (auto i : members) insert(i);
}

bool IndexSet::contains(std::size_t i) const {
  return std::find(members_.begin(), members_.end(), i) != members_.end();
}

void IndexSet::insert(std::size_t i) {
  if (contains(i)) throw Error(Errc::InvalidArgument, "duplicate index " + std::to_string(i));
  members_.push_back(i);
}

IndexSet IndexSet::complement(std::size_t n) const {
  IndexSet out;
  for (std::size_t k = 0; k < n; ++k)
    if (!contains(k)) out.members_.push_back(k);
  return out;
}

IndexSet IndexSet::complement(std::size_t n, std::size_t also_excluded) const {
  IndexSet out;
  for (std::size_t k = 0; k < n; ++k)
    if (k != also_excluded && !contains(k)) out.members_.push_back(k);
  return out;
}

void IndexSet::check_bounds(std::size_t n) const {
  for (auto i : members_)
    if (i >= n)
      throw Error(Errc::InvalidArgument,
                  "index " + std::to_string(i) + " out of range for " + std::to_string(n) + " tasks");
}

double conditional_variance(const TaskCovariance& kappa, std::size_t i, const IndexSet& selected) {
  const std::size_t n = kappa.size();
  if (i >= n) throw Error(Errc::InvalidArgument, "index " + std::to_string(i) + " out of range");
  selected.check_bounds(n);
  if (selected.contains(i))
    throw Error(Errc::InvalidArgument, "index " + std::to_string(i) + " is in the conditioning set");
  if (selected.empty()) return 1.0;

  const auto& idx = selected.members();
  const JitteredCholesky chol(principal_submatrix(kappa.values, idx));
  const double explained = chol.whiten(gather(kappa.values, i, idx)).squaredNorm();
  return std::clamp(1.0 - explained, kVarianceFloor, 1.0);
}

GainValue information_gain(const TaskCovariance& kappa, std::size_t i, const IndexSet& selected) {
  GainValue g;
  g.index = i;
  g.numerator_variance = conditional_variance(kappa, i, selected);
  g.denominator_variance = conditional_variance(kappa, i, selected.complement(kappa.size(), i));
  g.delta = 0.5 * std::log(g.numerator_variance / g.denominator_variance);
  return g;
}

double mutual_information(const TaskCovariance& kappa, const IndexSet& selected) {
  const std::size_t n = kappa.size();
  selected.check_bounds(n);
  if (selected.empty() || selected.size() == n) return 0.0;
  const IndexSet rest = selected.complement(n);
  const double ld_s = JitteredCholesky(principal_submatrix(kappa.values, selected.members())).log_determinant();
  const double ld_r = JitteredCholesky(principal_submatrix(kappa.values, rest.members())).log_determinant();
  const double ld_all = JitteredCholesky(kappa.values).log_determinant();
  return 0.5 * (ld_s + ld_r - ld_all);
}

double gaussian_kl(const TaskCovariance& reference, const TaskCovariance& estimate) {
  if (reference.size() != estimate.size())
    throw Error(Errc::DimensionMismatch, "covariances have orders " + std::to_string(reference.size()) +
                                             " and " + std::to_string(estimate.size()));
  if (reference.ids != estimate.ids)
    throw Error(Errc::DimensionMismatch, "covariances index different checkpoints");
  const auto n = static_cast<double>(reference.size());
  const JitteredCholesky est(estimate.values);
  const JitteredCholesky ref(reference.values);
  const double trace = est.solve(reference.values).trace();
  return 0.5 * (trace - n + est.log_determinant() - ref.log_determinant());
}

double vec_cosine(const TaskCovariance& a, const TaskCovariance& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw Error(Errc::DimensionMismatch, "covariances have different orders");
  const double na = a.values.norm();
  const double nb = b.values.norm();
  if (na == 0.0 || nb == 0.0) throw Error(Errc::InvalidArgument, "cosine of a zero matrix");
  return (a.values.array() * b.values.array()).sum() / (na * nb);
}

}  // namespace taskzoo
