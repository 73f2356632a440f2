// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/kernel_alignment.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "taskzoo/error.hpp"
#include "taskzoo/json_io.hpp"
#include "taskzoo/linalg.hpp"

namespace taskzoo {
namespace {

Eigen::MatrixXd prepared(const FeatureMatrix& f, bool center) {
  if (!center) return f.values;
  Eigen::MatrixXd c = f.values;
  c.colwise() -= c.rowwise().mean();
  return c;
}

// <F_a'F_a, F_b'F_b>_F. Uses the d_a x d_b cross product when that is no
// larger than the m x m Gram matrices.
double gram_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index m = a.cols();
  if (a.rows() * b.rows() <= m * m) return (a * b.transpose()).squaredNorm();
  const Eigen::MatrixXd ka = a.transpose() * a;
  const Eigen::MatrixXd kb = b.transpose() * b;
  return (ka.array() * kb.array()).sum();
}

double self_norm(const Eigen::MatrixXd& f, const std::string& id) {
  const double sq = gram_inner(f, f);
  if (!(sq > 0.0)) throw Error(Errc::ZeroGram, "checkpoint '" + id + "' has an all-zero Gram matrix");
  return std::sqrt(sq);
}

}  // namespace

TaskCovariance TaskCovariance::identity(std::vector<std::string> ids) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  return {std::move(ids), Eigen::MatrixXd::Identity(n, n)};
}

TaskCovariance TaskCovariance::from_matrix(Eigen::MatrixXd values, std::vector<std::string> ids) {
  if (values.rows() != values.cols())
    throw Error(Errc::DimensionMismatch, "covariance must be square");
  if (ids.empty())
    for (Eigen::Index k = 0; k < values.rows(); ++k) ids.push_back(std::to_string(k));
  if (static_cast<Eigen::Index>(ids.size()) != values.rows())
    throw Error(Errc::DimensionMismatch, "id count does not match covariance order");
  return {std::move(ids), std::move(values)};
}

Eigen::MatrixXd gram(const FeatureMatrix& features, bool center) {
  const Eigen::MatrixXd f = prepared(features, center);
  Eigen::MatrixXd k = f.transpose() * f;
  if (k.cwiseAbs().maxCoeff() == 0.0)
    throw Error(Errc::ZeroGram, "checkpoint '" + features.checkpoint_id + "' has an all-zero Gram matrix");
  return k;
}

double kernel_alignment(const FeatureMatrix& a, const FeatureMatrix& b, bool center) {
  if (a.count() != b.count())
    throw Error(Errc::CountMismatch, "'" + a.checkpoint_id + "' has " + std::to_string(a.count()) +
                                         " samples, '" + b.checkpoint_id + "' has " +
                                         std::to_string(b.count()));
  const Eigen::MatrixXd fa = prepared(a, center);
  const Eigen::MatrixXd fb = prepared(b, center);
  const double na = self_norm(fa, a.checkpoint_id);
  const double nb = self_norm(fb, b.checkpoint_id);
  return gram_inner(fa, fb) / (na * nb);
}

TaskCovariance estimate_covariance(const ValidatedZoo& zoo, const AlignmentOptions& options) {
  const std::size_t n = zoo.size();
  std::vector<Eigen::MatrixXd> feats;
  std::vector<double> norms;
  feats.reserve(n);
  norms.reserve(n);
  for (const auto& f : zoo.matrices()) {
    feats.push_back(prepared(f, options.center));
    norms.push_back(self_norm(feats.back(), f.checkpoint_id));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  TaskCovariance kappa = TaskCovariance::identity(zoo.ids());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    kappa.values(ii, ii) = gram_inner(feats[i], feats[i]) / (norms[i] * norms[i]);
  }
  parallel_for(pairs.size(), options.jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double v = gram_inner(feats[i], feats[j]) / (norms[i] * norms[j]);
    kappa.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    kappa.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  });
  return kappa;
}

PsdReport psd_report(const TaskCovariance& kappa) {
  PsdReport r;
  if (kappa.size() == 0) return r;
  const Eigen::MatrixXd sym = 0.5 * (kappa.values + kappa.values.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  r.min_eigenvalue = ev.minCoeff();
  r.max_eigenvalue = ev.maxCoeff();
  for (double v : r.eigenvalues)
    if (v < -kPsdTolerance) ++r.violations;
  return r;
}

std::vector<std::string> covariance_violations(const TaskCovariance& kappa) {
  std::vector<std::string> out;
  const auto& v = kappa.values;
  if (!v.allFinite()) return {"finite"};
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > kUnitTolerance) out.emplace_back("symmetry");
  if ((v.diagonal().array() - 1.0).abs().maxCoeff() > kUnitTolerance)
    out.emplace_back("unit_diagonal");
  if (v.minCoeff() < 0.0 || v.maxCoeff() > 1.0 + kUnitTolerance) out.emplace_back("range");
  if (psd_report(kappa).violations > 0) out.emplace_back("psd");
  return out;
}

std::string covariance_to_json(const TaskCovariance& kappa) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < kappa.values.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < kappa.values.cols(); ++j) row.push_back(kappa.values(i, j));
    rows.push_back(std::move(row));
  }
  return dump_canonical(Json{{"ids", kappa.ids}, {"kappa", rows}});
}

TaskCovariance covariance_from_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::MalformedFile, std::string("kappa: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("kappa") || !doc["kappa"].is_array())
    throw Error(Errc::MalformedFile, "kappa document needs a \"kappa\" matrix");
  const auto& rows = doc["kappa"];
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw Error(Errc::MalformedFile, "kappa matrix is empty");
  Eigen::MatrixXd values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(Errc::MalformedFile, "kappa row " + std::to_string(i) + " has wrong length");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number()) throw Error(Errc::NonFiniteEntry, "kappa entry is not a finite number");
      values(i, j) = cell.get<double>();
    }
  }
  std::vector<std::string> ids;
  if (doc.contains("ids")) {
    if (!doc["ids"].is_array()) throw Error(Errc::MalformedFile, "\"ids\" must be an array");
    for (const auto& id : doc["ids"]) {
      if (!id.is_string()) throw Error(Errc::MalformedFile, "ids must be strings");
      ids.push_back(id.get<std::string>());
    }
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
      throw Error(Errc::DuplicateId, "kappa ids are not unique");
  }
  return TaskCovariance::from_matrix(std::move(values), std::move(ids));
}

TaskCovariance load_covariance(const std::filesystem::path& path) {
  return covariance_from_json(read_text_file(path));
}

std::string covariance_to_csv(const TaskCovariance& kappa) {
  std::ostringstream out;
  out << "id";
  for (const auto& id : kappa.ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    out << kappa.ids[i];
    for (std::size_t j = 0; j < kappa.size(); ++j) out << ',' << format_double(kappa(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace taskzoo
