// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taskzoo/gp_task_space.hpp"

namespace taskzoo {

struct SelectionTrace {
  std::vector<GainValue> picks;  // in selection order
  std::size_t budget = 0;
  double final_mi = 0.0;
  // False iff some pick had delta <= 0, i.e. the trace left the range where
  // adding checkpoints increases the objective.
  bool monotonic_regime = true;

  IndexSet selected() const;
};

inline constexpr double kTieTolerance = 1e-12;

struct SelectOptions {
  int jobs = 1;
};

// Greedy maximization of I(S; Z-S). Each step adds the candidate with the
// largest gain; gains within 1e-12 of each other go to the lowest index.
// Requires 1 <= budget <= n-1.
SelectionTrace select_mmi(const TaskCovariance& kappa, std::size_t budget,
                          const SelectOptions& options = {});

inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

// Exact maximizer of I(S; Z-S) over all subsets of size `budget`. Ties go to
// the lexicographically smallest sorted tuple; picks are listed ascending with
// gains recomputed along that order. Throws TooLarge past C(n, K) = 1e6.
SelectionTrace brute_force_select(const TaskCovariance& kappa, std::size_t budget);

// Saturating binomial coefficient.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct SubmodularityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  // Trials where some log-determinant failed (non-PSD or singular input).
  std::size_t numerical_failures = 0;
  double worst_violation = 0.0;
  bool clean() const { return violations == 0 && numerical_failures == 0; }
};

inline constexpr double kSubmodularSlack = 1e-9;

// Random (S subset-of S', i outside S') triples checking
//   f(S+i) - f(S) >= f(S'+i) - f(S') - 1e-9,   f = mutual_information.
SubmodularityReport check_submodularity(const TaskCovariance& kappa, std::size_t trials,
                                        std::uint64_t seed);

struct QualityRow {
  std::size_t budget = 0;
  double greedy_mi = 0.0;
  double optimal_mi = 0.0;
  double ratio = 1.0;  // 0/0 counts as 1
  bool all_gains_positive = true;
};

// Greedy against brute force for every budget 1..max_budget.
std::vector<QualityRow> greedy_quality(const TaskCovariance& kappa, std::size_t max_budget);

std::string trace_to_json(const TaskCovariance& kappa, const SelectionTrace& trace,
                          const SelectionTrace* oracle = nullptr);
std::string quality_to_json(const std::vector<QualityRow>& rows);
std::string submodularity_to_json(const SubmodularityReport& report);

}  // namespace taskzoo
