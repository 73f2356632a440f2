// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taskzoo/feature_store.hpp"
#include "taskzoo/kernel_alignment.hpp"

namespace taskzoo {

// Nested probing-sample subsets S_1 c S_2 c ... c S_steps = all samples.
// Sizes halve going backwards from m (so they are evenly spaced on a log
// axis), each subset is a prefix of one seeded permutation, and the column
// indices inside a subset are ascending.
std::vector<std::vector<Eigen::Index>> nested_schedule(Eigen::Index total, std::size_t steps,
                                                       std::uint64_t seed);

struct ConvergenceReport {
  std::vector<Eigen::Index> sizes;  // sizes[0] == 0 is the identity baseline
  std::vector<double> kl;           // KL(reference || estimate)
  std::vector<double> cosine;
  std::string reference_id;
};

// Compares kappa estimated on each subset against the reference. The
// reference defaults to kappa on the zoo's full data; `compare_with`
// supplies it from a second zoo with the same ids instead (cross-corpus
// comparison).
ConvergenceReport convergence_curve(const ValidatedZoo& zoo,
                                    const std::vector<std::vector<Eigen::Index>>& schedule,
                                    const AlignmentOptions& options = {},
                                    const ValidatedZoo* compare_with = nullptr);

std::string convergence_to_json(const ConvergenceReport& report);
// Two-column CSV, "size,<metric>".
std::string convergence_to_csv(const ConvergenceReport& report, bool kl_metric);

}  // namespace taskzoo
