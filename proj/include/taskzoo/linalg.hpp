// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace taskzoo {

// Cholesky factor of a symmetric PSD matrix. On failure the diagonal is
// jittered with 1e-10, escalating x10 up to 1e-6; past that the
// factorization throws SingularConditioning.
class JitteredCholesky {
 public:
  explicit JitteredCholesky(const Eigen::MatrixXd& a);

  double jitter() const { return jitter_; }
  double log_determinant() const;
  // Solves A x = b.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  // Returns L^{-1} b, so that b' A^{-1} b == squaredNorm of the result.
  Eigen::VectorXd whiten(const Eigen::VectorXd& b) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterMax = 1e-6;

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const std::size_t> idx);
Eigen::VectorXd gather(const Eigen::MatrixXd& a, std::size_t row, std::span<const std::size_t> cols);

// Runs body(k) for k in [0, count) on up to `jobs` threads. jobs <= 1 runs
// inline. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace taskzoo
