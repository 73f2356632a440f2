// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "taskzoo/feature_store.hpp"

namespace taskzoo {

// Covariance of the task-space Gaussian process: pairwise kernel alignment
// between checkpoints, indexed in zoo order.
struct TaskCovariance {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  std::size_t size() const { return ids.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  static TaskCovariance identity(std::vector<std::string> ids);
  // Ids default to "0", "1", ...
  static TaskCovariance from_matrix(Eigen::MatrixXd values, std::vector<std::string> ids = {});
};

struct AlignmentOptions {
  // Center features over probing samples (centered alignment). Off by default.
  bool center = false;
  int jobs = 1;
};

// m x m Gram matrix F'F. Throws ZeroGram when every entry is zero.
Eigen::MatrixXd gram(const FeatureMatrix& features, bool center = false);

// <K_i, K_j>_F / (|K_i|_F |K_j|_F) with K = F'F, in [0, 1].
double kernel_alignment(const FeatureMatrix& a, const FeatureMatrix& b, bool center = false);

TaskCovariance estimate_covariance(const ValidatedZoo& zoo, const AlignmentOptions& options = {});

struct PsdReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::size_t violations = 0;  // eigenvalues below -kPsdTolerance
  std::vector<double> eigenvalues;  // ascending
};

inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kUnitTolerance = 1e-12;

// Uses the symmetric part of the matrix.
PsdReport psd_report(const TaskCovariance& kappa);

// Names of violated covariance invariants ("symmetry", "unit_diagonal",
// "psd", "range"); empty when all hold.
std::vector<std::string> covariance_violations(const TaskCovariance& kappa);

// {"ids": [...], "kappa": [[...], ...]}
std::string covariance_to_json(const TaskCovariance& kappa);
TaskCovariance covariance_from_json(const std::string& text);
TaskCovariance load_covariance(const std::filesystem::path& path);
// Header row "id,<ids...>", then one row per checkpoint led by its id.
std::string covariance_to_csv(const TaskCovariance& kappa);

}  // namespace taskzoo
