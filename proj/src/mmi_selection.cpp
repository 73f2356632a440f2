// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/mmi_selection.hpp"

#include <algorithm>
#include <random>

#include "taskzoo/error.hpp"
#include "taskzoo/json_io.hpp"
#include "taskzoo/linalg.hpp"

namespace taskzoo {
namespace {

void check_budget(const TaskCovariance& kappa, std::size_t budget) {
  const std::size_t n = kappa.size();
  if (budget < 1 || budget + 1 > n)
    throw Error(Errc::BudgetOutOfRange, "budget " + std::to_string(budget) +
                                            " outside [1, " + std::to_string(n == 0 ? 0 : n - 1) + "]");
}

SelectionTrace trace_along(const TaskCovariance& kappa, const std::vector<std::size_t>& order) {
  SelectionTrace t;
  t.budget = order.size();
  IndexSet s;
  for (auto i : order) {
    t.picks.push_back(information_gain(kappa, i, s));
    s.insert(i);
  }
  t.final_mi = mutual_information(kappa, s);
  t.monotonic_regime = std::all_of(t.picks.begin(), t.picks.end(),
                                   [](const GainValue& g) { return g.delta > 0.0; });
  return t;
}

Json gain_json(const TaskCovariance& kappa, const GainValue& g) {
  return {{"index", g.index},
          {"id", kappa.ids.at(g.index)},
          {"delta", g.delta},
          {"numerator_variance", g.numerator_variance},
          {"denominator_variance", g.denominator_variance}};
}

Json trace_json(const TaskCovariance& kappa, const SelectionTrace& t) {
  Json picks = Json::array();
  for (const auto& g : t.picks) picks.push_back(gain_json(kappa, g));
  return {{"picks", picks},
          {"k", t.budget},
          {"final_mi", t.final_mi},
          {"monotonic_regime", t.monotonic_regime}};
}

}  // namespace

IndexSet SelectionTrace::selected() const {
  IndexSet s;
  for (const auto& g : picks) s.insert(g.index);
  return s;
}

SelectionTrace select_mmi(const TaskCovariance& kappa, std::size_t budget,
                          const SelectOptions& options) {
  check_budget(kappa, budget);
  const std::size_t n = kappa.size();
  SelectionTrace t;
  t.budget = budget;
  IndexSet s;
  for (std::size_t step = 0; step < budget; ++step) {
    const IndexSet candidates = s.complement(n);
    std::vector<GainValue> gains(candidates.size());
    parallel_for(candidates.size(), options.jobs, [&](std::size_t k) {
      gains[k] = information_gain(kappa, candidates.members()[k], s);
    });
    // Candidates are ascending, so keeping the first within tolerance gives
    // the lowest index.
    std::size_t best = 0;
    for (std::size_t k = 1; k < gains.size(); ++k)
      if (gains[k].delta > gains[best].delta + kTieTolerance) best = k;
    t.picks.push_back(gains[best]);
    s.insert(gains[best].index);
  }
  t.final_mi = mutual_information(kappa, s);
  t.monotonic_regime = std::all_of(t.picks.begin(), t.picks.end(),
                                   [](const GainValue& g) { return g.delta > 0.0; });
  return t;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    const std::uint64_t num = n - k + j;
    // r * num / j is exact at each step; saturate before overflow.
    if (r > UINT64_MAX / num) return UINT64_MAX;
    r = r * num / j;
  }
  return r;
}

SelectionTrace brute_force_select(const TaskCovariance& kappa, std::size_t budget) {
  check_budget(kappa, budget);
  const std::size_t n = kappa.size();
  if (binomial(n, budget) > kBruteForceLimit)
    throw Error(Errc::TooLarge, "C(" + std::to_string(n) + ", " + std::to_string(budget) +
                                    ") subsets exceeds the enumeration limit");

  std::vector<std::size_t> combo(budget);
  for (std::size_t k = 0; k < budget; ++k) combo[k] = k;
  std::vector<std::size_t> best_combo = combo;
  double best = -1.0;
  bool first = true;
  while (true) {
    const double mi = mutual_information(kappa, IndexSet(combo));
    if (first || mi > best + kTieTolerance) {
      best = mi;
      best_combo = combo;
      first = false;
    }
    // Next combination in lexicographic order.
    std::size_t pos = budget;
    while (pos > 0 && combo[pos - 1] == n - budget + pos - 1) --pos;
    if (pos == 0) break;
    ++combo[pos - 1];
    for (std::size_t k = pos; k < budget; ++k) combo[k] = combo[k - 1] + 1;
  }
  return trace_along(kappa, best_combo);
}

SubmodularityReport check_submodularity(const TaskCovariance& kappa, std::size_t trials,
                                        std::uint64_t seed) {
  const std::size_t n = kappa.size();
  if (n < 3) throw Error(Errc::InvalidArgument, "submodularity check needs at least 3 tasks");
  SubmodularityReport r;
  r.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t i = pick(rng);
    const double p_outer = unit(rng);
    const double p_inner = unit(rng);
    IndexSet outer, inner;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || unit(rng) >= p_outer) continue;
      outer.insert(k);
      if (unit(rng) < p_inner) inner.insert(k);
    }
    try {
      IndexSet inner_i = inner, outer_i = outer;
      inner_i.insert(i);
      outer_i.insert(i);
      const double small = mutual_information(kappa, inner_i) - mutual_information(kappa, inner);
      const double large = mutual_information(kappa, outer_i) - mutual_information(kappa, outer);
      const double excess = large - small;
      if (excess > kSubmodularSlack) {
        ++r.violations;
        r.worst_violation = std::max(r.worst_violation, excess);
      }
    } catch (const Error& e) {
      if (e.code() != Errc::SingularConditioning) throw;
      ++r.numerical_failures;
    }
  }
  return r;
}

std::vector<QualityRow> greedy_quality(const TaskCovariance& kappa, std::size_t max_budget) {
  check_budget(kappa, max_budget);
  std::vector<QualityRow> rows;
  const SelectionTrace greedy = select_mmi(kappa, max_budget);
  for (std::size_t k = 1; k <= max_budget; ++k) {
    QualityRow row;
    row.budget = k;
    // Greedy traces nest, so the budget-k trace is a prefix of the longest one.
    std::vector<std::size_t> prefix;
    for (std::size_t j = 0; j < k; ++j) prefix.push_back(greedy.picks[j].index);
    row.greedy_mi = mutual_information(kappa, IndexSet(prefix));
    row.optimal_mi = brute_force_select(kappa, k).final_mi;
    row.ratio = row.optimal_mi > kTieTolerance ? row.greedy_mi / row.optimal_mi : 1.0;
    row.all_gains_positive = std::all_of(greedy.picks.begin(), greedy.picks.begin() + k,
                                         [](const GainValue& g) { return g.delta > 0.0; });
    rows.push_back(row);
  }
  return rows;
}

std::string trace_to_json(const TaskCovariance& kappa, const SelectionTrace& trace,
                          const SelectionTrace* oracle) {
  Json doc = trace_json(kappa, trace);
  if (oracle) {
    doc["oracle"] = trace_json(kappa, *oracle);
    doc["ratio"] = oracle->final_mi > kTieTolerance ? trace.final_mi / oracle->final_mi : 1.0;
  }
  return dump_canonical(doc);
}

std::string quality_to_json(const std::vector<QualityRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"k", r.budget},
                   {"greedy_mi", r.greedy_mi},
                   {"optimal_mi", r.optimal_mi},
                   {"ratio", r.ratio},
                   {"all_gains_positive", r.all_gains_positive}});
  return dump_canonical(Json{{"rows", arr}});
}

std::string submodularity_to_json(const SubmodularityReport& r) {
  return dump_canonical(Json{{"trials", r.trials},
                             {"violations", r.violations},
                             {"numerical_failures", r.numerical_failures},
                             {"worst_violation", r.worst_violation}});
}

}  // namespace taskzoo
