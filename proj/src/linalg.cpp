// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/linalg.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "taskzoo/error.hpp"

namespace taskzoo {
namespace {

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto d = llt.matrixLLT().diagonal();
  for (Eigen::Index k = 0; k < d.size(); ++k)
    if (!(d[k] > 0.0) || !std::isfinite(d[k])) return false;
  return true;
}

}  // namespace

JitteredCholesky::JitteredCholesky(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "Cholesky of non-square matrix");
  if (!a.allFinite()) throw Error(Errc::SingularConditioning, "matrix has non-finite entries");
  llt_.compute(a);
  if (factor_ok(llt_)) return;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (double j = kJitterStart; j <= kJitterMax * (1 + 1e-9); j *= 10) {
    llt_.compute(a + j * eye);
    if (factor_ok(llt_)) {
      jitter_ = j;
      return;
    }
  }
  throw Error(Errc::SingularConditioning,
              "matrix of order " + std::to_string(a.rows()) + " not positive definite with jitter " +
                  std::to_string(kJitterMax));
}

double JitteredCholesky::log_determinant() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Eigen::MatrixXd JitteredCholesky::solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

Eigen::VectorXd JitteredCholesky::whiten(const Eigen::VectorXd& b) const {
  return llt_.matrixL().solve(b);
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const std::size_t> idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      out(r, c) = a(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
  return out;
}

Eigen::VectorXd gather(const Eigen::MatrixXd& a, std::size_t row, std::span<const std::size_t> cols) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    out[static_cast<Eigen::Index>(k)] =
        a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(cols[k]));
  return out;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace taskzoo
