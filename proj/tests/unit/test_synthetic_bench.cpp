// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "taskzoo/error.hpp"
#include "taskzoo/kernel_alignment.hpp"
#include "taskzoo/synthetic_bench.hpp"
#include "../test_support.hpp"

using namespace taskzoo;

namespace {

TaskUniverseConfig small_config() {
  TaskUniverseConfig c;
  c.n_seen = 12;
  c.n_unseen = 3;
  c.latent_dim = 16;
  c.classes_per_task = 5;
  c.seen_train_per_class = 30;
  c.train_per_class = 10;
  c.test_per_class = 10;
  c.probe_count = 120;
  return c;
}

}  // namespace

TEST_SUITE("synthetic_bench") {

TEST_CASE("universe generation is deterministic and well formed") {
  const TaskUniverseConfig cfg = small_config();
  const TaskUniverse a = generate_universe(cfg);
  const TaskUniverse b = generate_universe(cfg);
  REQUIRE(a.zoo.size() == cfg.n_seen);
  CHECK(a.zoo.count() == static_cast<Eigen::Index>(cfg.probe_count));
  CHECK(a.zoo.ids().front() == "task0");
  for (std::size_t k = 0; k < a.zoo.size(); ++k) {
    CHECK(a.zoo.matrices()[k].dim() == static_cast<Eigen::Index>(cfg.feature_dim));
    CHECK(a.zoo.matrices()[k].values == b.zoo.matrices()[k].values);
  }
  CHECK(a.unseen.size() == cfg.n_unseen);
  CHECK(a.unseen[0].train.labels.size() == cfg.classes_per_task * cfg.train_per_class);
  CHECK(a.features({0, 3}, a.unseen[0].test.inputs).cols() == 2 * static_cast<Eigen::Index>(cfg.feature_dim));

  TaskUniverseConfig other = cfg;
  other.seed = 1;
  CHECK(generate_universe(other).zoo.matrices()[0].values != a.zoo.matrices()[0].values);
}

TEST_CASE("tasks on disjoint axes give a near-identity covariance") {
  TaskUniverseConfig cfg = small_config();
  cfg.n_seen = 4;
  cfg.disjoint_subspaces = true;
  cfg.probe_count = 2000;
  cfg.noise_scale = 0.0;
  const TaskCovariance k = estimate_covariance(generate_universe(cfg).zoo);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(k(i, j)) < 0.1);
}

TEST_CASE("checkpoints for the same task align strongly") {
  const TaskUniverseConfig cfg = small_config();
  std::mt19937_64 rng(5);
  std::vector<std::size_t> pool(cfg.latent_dim);
  std::iota(pool.begin(), pool.end(), 0);
  const TaskDef t = draw_task(cfg, pool, rng);
  const Eigen::MatrixXd w1 = fit_checkpoint(cfg, t, rng);
  const Eigen::MatrixXd w2 = fit_checkpoint(cfg, t, rng);
  const Eigen::MatrixXd probes = taskzoo::testing::gaussian_matrix(static_cast<Eigen::Index>(cfg.latent_dim), 500, rng);
  const double ka = kernel_alignment({"a", w1 * probes}, {"b", w2 * probes});
  CHECK(ka > 0.99);
}

TEST_CASE("linear head fits separable data") {
  Eigen::MatrixXd x(2, 40);
  std::vector<std::size_t> y(40);
  for (int i = 0; i < 40; ++i) {
    const std::size_t c = static_cast<std::size_t>(i % 4);
    x(0, i) = (c & 1 ? 5.0 : -5.0) + 0.01 * i;
    x(1, i) = (c & 2 ? 5.0 : -5.0) - 0.01 * i;
    y[static_cast<std::size_t>(i)] = c;
  }
  const LinearHead h = train_linear_head(x.transpose(), y, 4);
  CHECK(h.weights.rows() == 3);
  CHECK(accuracy(h.predict(x.transpose()), y) == 1.0);

  // A duplicated feature column keeps the ridge problem well posed.
  Eigen::MatrixXd dup(40, 3);
  dup << x.transpose(), x.row(0).transpose();
  CHECK(accuracy(train_linear_head(dup, y, 4).predict(dup), y) == 1.0);
}

TEST_CASE("linear head rejects degenerate labels") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 2);
  try {
    train_linear_head(x, {0, 0, 0, 0, 0}, 3);
    FAIL("expected DegenerateLabels");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateLabels);
  }
  CHECK_THROWS_AS(train_linear_head(x, {0, 1, 0}, 2), Error);
  CHECK_THROWS_AS(train_linear_head(x, {0, 1, 0, 1, 7}, 2), Error);
}

TEST_CASE("config validation and JSON") {
  TaskUniverseConfig cfg;
  cfg.task_subspace_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TaskUniverseConfig{};
  cfg.n_seen = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  const TaskUniverseConfig back = config_from_json(config_to_json(small_config()));
  CHECK(config_to_json(back) == config_to_json(small_config()));
  try {
    config_from_json(Json{{"n_seen", 5}, {"typo", 1}});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
  }
}

TEST_CASE("small bench produces one row per budget") {
  const TaskUniverse u = generate_universe(small_config());
  const BenchReport r = run_bench(u, {1, 2, 3}, 3);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.mmi_set.size() == row.k);
    CHECK(row.peek_set.size() == row.k);
    CHECK(row.random_accs.size() == 3);
    CHECK(row.mmi_acc >= 0.0);
    CHECK(row.mmi_acc <= 1.0);
  }
  CHECK(bench_to_json(r) == bench_to_json(run_bench(u, {1, 2, 3}, 3, 2)));
  CHECK(bench_to_csv(r).find('\n') != std::string::npos);
}

TEST_CASE("random zoo shape") {
  const ValidatedZoo z = random_zoo(5, 30, 7, 2);
  CHECK(z.size() == 5);
  CHECK(z.count() == 30);
  CHECK(z.ids()[4] == "ckpt4");
  for (const auto& m : z.matrices()) {
    CHECK(m.dim() >= 1);
    CHECK(m.dim() <= 7);
  }
}

}  // TEST_SUITE
