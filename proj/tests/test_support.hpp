// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "taskzoo/kernel_alignment.hpp"
#include "taskzoo/synthetic_bench.hpp"

namespace taskzoo::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = n(rng);
  return m;
}

// Haar-ish orthogonal matrix from the QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(n, n, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// Kernel-alignment covariance of a random zoo: a valid task covariance with
// varied structure.
inline TaskCovariance random_kappa(std::size_t n, std::uint64_t seed, std::size_t m = 60,
                                   std::size_t max_dim = 12) {
  return estimate_covariance(random_zoo(n, m, max_dim, seed));
}

// Normalized Wishart matrix: PSD, unit diagonal, entries of either sign.
inline TaskCovariance random_correlation(std::size_t n, std::mt19937_64& rng, Eigen::Index dof = 0) {
  const Eigen::Index k = dof > 0 ? dof : static_cast<Eigen::Index>(n) + 2;
  const Eigen::MatrixXd x = gaussian_matrix(static_cast<Eigen::Index>(n), k, rng);
  Eigen::MatrixXd c = x * x.transpose();
  const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  c = d.asDiagonal() * c * d.asDiagonal();
  c.diagonal().setOnes();
  return TaskCovariance::from_matrix(c);
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("taskzoo_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace taskzoo::testing
