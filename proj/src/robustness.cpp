// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/robustness.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "taskzoo/error.hpp"
#include "taskzoo/gp_task_space.hpp"
#include "taskzoo/json_io.hpp"
#include "taskzoo/linalg.hpp"

namespace taskzoo {

std::vector<std::vector<Eigen::Index>> nested_schedule(Eigen::Index total, std::size_t steps,
                                                       std::uint64_t seed) {
  if (steps < 1) throw Error(Errc::BadSchedule, "need at least one step");
  if (total < static_cast<Eigen::Index>(steps))
    throw Error(Errc::BadSchedule, "cannot split " + std::to_string(total) + " samples into " +
                                       std::to_string(steps) + " strictly growing subsets");

  const auto k_steps = static_cast<Eigen::Index>(steps);
  std::vector<Eigen::Index> sizes(steps);
  for (Eigen::Index k = 0; k < k_steps; ++k) {
    const double halvings = static_cast<double>(k_steps - 1 - k);
    sizes[static_cast<std::size_t>(k)] =
        static_cast<Eigen::Index>(std::ceil(static_cast<double>(total) / std::exp2(halvings)));
  }
  // Keep sizes strictly increasing and ending at total.
  sizes.back() = total;
  for (std::size_t k = 0; k < steps; ++k)
    sizes[k] = std::max<Eigen::Index>(sizes[k], static_cast<Eigen::Index>(k) + 1);
  for (std::size_t k = steps - 1; k-- > 0;) sizes[k] = std::min(sizes[k], sizes[k + 1] - 1);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(steps);
  for (auto size : sizes) {
    std::vector<Eigen::Index> subset(perm.begin(), perm.begin() + size);
    std::sort(subset.begin(), subset.end());
    out.push_back(std::move(subset));
  }
  return out;
}

ConvergenceReport convergence_curve(const ValidatedZoo& zoo,
                                    const std::vector<std::vector<Eigen::Index>>& schedule,
                                    const AlignmentOptions& options,
                                    const ValidatedZoo* compare_with) {
  if (schedule.empty()) throw Error(Errc::BadSchedule, "empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& s = schedule[k];
    if (s.empty()) throw Error(Errc::BadSchedule, "empty subset in schedule");
    for (auto c : s)
      if (c < 0 || c >= zoo.count()) throw Error(Errc::BadSchedule, "column index out of range");
    if (k > 0) {
      const auto& prev = schedule[k - 1];
      if (s.size() <= prev.size() ||
          !std::includes(s.begin(), s.end(), prev.begin(), prev.end()))
        throw Error(Errc::BadSchedule, "schedule subsets are not strictly nested");
    }
  }

  ConvergenceReport r;
  TaskCovariance reference;
  if (compare_with) {
    if (compare_with->ids() != zoo.ids())
      throw Error(Errc::DimensionMismatch, "comparison zoo lists different checkpoints");
    reference = estimate_covariance(*compare_with, options);
    r.reference_id = "full data of comparison zoo (" +
                     compare_with->manifest().probing_description + ")";
  } else {
    reference = estimate_covariance(zoo, options);
    r.reference_id = "full data (" + std::to_string(zoo.count()) + " samples)";
  }

  const TaskCovariance identity = TaskCovariance::identity(zoo.ids());
  r.sizes.push_back(0);
  r.kl.push_back(gaussian_kl(reference, identity));
  r.cosine.push_back(vec_cosine(reference, identity));

  std::vector<TaskCovariance> estimates(schedule.size());
  AlignmentOptions inner = options;
  inner.jobs = 1;
  parallel_for(schedule.size(), options.jobs, [&](std::size_t k) {
    try {
      estimates[k] = estimate_covariance(zoo.restrict_columns(schedule[k]), inner);
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroGram) throw;
      throw Error(Errc::ZeroGram, std::string(e.what()) + " on a subset of " +
                                      std::to_string(schedule[k].size()) + " samples");
    }
  });
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    r.sizes.push_back(static_cast<Eigen::Index>(schedule[k].size()));
    r.kl.push_back(gaussian_kl(reference, estimates[k]));
    r.cosine.push_back(vec_cosine(reference, estimates[k]));
  }
  return r;
}

std::string convergence_to_json(const ConvergenceReport& r) {
  return dump_canonical(Json{{"sizes", r.sizes},
                             {"kl", r.kl},
                             {"cosine", r.cosine},
                             {"reference", r.reference_id}});
}

std::string convergence_to_csv(const ConvergenceReport& r, bool kl_metric) {
  std::ostringstream out;
  out << "size," << (kl_metric ? "kl" : "cosine") << '\n';
  const auto& vals = kl_metric ? r.kl : r.cosine;
  for (std::size_t k = 0; k < r.sizes.size(); ++k)
    out << r.sizes[k] << ',' << format_double(vals[k]) << '\n';
  return out.str();
}

}  // namespace taskzoo
