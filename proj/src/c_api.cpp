// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/taskzoo.h"

#include <cstring>
#include <exception>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "taskzoo/clustering.hpp"
#include "taskzoo/error.hpp"
#include "taskzoo/feature_store.hpp"
#include "taskzoo/gp_task_space.hpp"
#include "taskzoo/json_io.hpp"
#include "taskzoo/kernel_alignment.hpp"
#include "taskzoo/mmi_selection.hpp"
#include "taskzoo/robustness.hpp"
#include "taskzoo/synthetic_bench.hpp"

struct tz_zoo {
  taskzoo::ValidatedZoo zoo;
};
struct tz_kappa {
  taskzoo::TaskCovariance kappa;
};
struct tz_trace {
  taskzoo::SelectionTrace trace;
};
struct tz_dendrogram {
  taskzoo::Dendrogram dendrogram;
};

namespace {

using namespace taskzoo;

thread_local std::string g_last_error;

tz_status to_status(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return TZ_ERR_INVALID_ARGUMENT;
    case Errc::Io: return TZ_ERR_IO;
    case Errc::MalformedFile: return TZ_ERR_MALFORMED_FILE;
    case Errc::NonFiniteEntry: return TZ_ERR_NON_FINITE;
    case Errc::CountMismatch: return TZ_ERR_COUNT_MISMATCH;
    case Errc::DuplicateId: return TZ_ERR_DUPLICATE_ID;
    case Errc::EmptyZoo: return TZ_ERR_EMPTY_ZOO;
    case Errc::ZeroGram: return TZ_ERR_ZERO_GRAM;
    case Errc::DimensionMismatch: return TZ_ERR_DIMENSION_MISMATCH;
    case Errc::SingularConditioning: return TZ_ERR_SINGULAR;
    case Errc::BudgetOutOfRange: return TZ_ERR_BUDGET;
    case Errc::TooLarge: return TZ_ERR_TOO_LARGE;
    case Errc::BadSchedule: return TZ_ERR_BAD_SCHEDULE;
    case Errc::ConfigError: return TZ_ERR_CONFIG;
    case Errc::DegenerateLabels: return TZ_ERR_DEGENERATE_LABELS;
    case Errc::InvariantViolation: return TZ_ERR_INVARIANT;
  }
  return TZ_ERR_INTERNAL;
}

template <typename F>
tz_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TZ_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TZ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TZ_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(Errc::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

AlignmentOptions alignment(const tz_kappa_options* o) {
  AlignmentOptions a;
  if (o) {
    a.center = o->center != 0;
    a.jobs = o->jobs;
  }
  return a;
}

IndexSet index_set(const size_t* set, size_t size) {
  if (size > 0) require(set, "set");
  return IndexSet(std::vector<std::size_t>(set, set + size));
}

tz_gain to_c(const GainValue& g) {
  return {g.index, g.delta, g.numerator_variance, g.denominator_variance};
}

}  // namespace

extern "C" {

const char* tz_version(void) { return "0.1.0"; }

const char* tz_status_name(tz_status status) {
  switch (status) {
    case TZ_OK: return "ok";
    case TZ_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case TZ_ERR_IO: return "IoError";
    case TZ_ERR_MALFORMED_FILE: return "MalformedFile";
    case TZ_ERR_NON_FINITE: return "NonFiniteEntry";
    case TZ_ERR_COUNT_MISMATCH: return "CountMismatch";
    case TZ_ERR_DUPLICATE_ID: return "DuplicateId";
    case TZ_ERR_EMPTY_ZOO: return "EmptyZoo";
    case TZ_ERR_ZERO_GRAM: return "ZeroGram";
    case TZ_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case TZ_ERR_SINGULAR: return "SingularConditioning";
    case TZ_ERR_BUDGET: return "BudgetOutOfRange";
    case TZ_ERR_TOO_LARGE: return "TooLarge";
    case TZ_ERR_BAD_SCHEDULE: return "BadSchedule";
    case TZ_ERR_CONFIG: return "ConfigError";
    case TZ_ERR_DEGENERATE_LABELS: return "DegenerateLabels";
    case TZ_ERR_INVARIANT: return "InvariantViolation";
    case TZ_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

int tz_status_exit_code(tz_status status) {
  switch (status) {
    case TZ_OK: return 0;
    case TZ_ERR_SINGULAR:
    case TZ_ERR_INVARIANT:
    case TZ_ERR_INTERNAL: return 3;
    default: return 2;
  }
}

const char* tz_last_error(void) { return g_last_error.c_str(); }

void tz_string_free(char* s) { std::free(s); }

tz_status tz_fmx1_write(const char* path, size_t dim, size_t count, const double* values) {
  return guarded([&] {
    require(path, "path");
    require(values, "values");
    if (dim == 0 || count == 0) throw Error(Errc::InvalidArgument, "empty feature matrix");
    FeatureMatrix f{"", Eigen::Map<const Eigen::MatrixXd>(values, static_cast<Eigen::Index>(dim),
                                                          static_cast<Eigen::Index>(count))};
    write_fmx1(path, f);
  });
}

tz_status tz_features_shape(const char* path, size_t* dim, size_t* count) {
  return guarded([&] {
    require(path, "path");
    require(dim, "dim");
    require(count, "count");
    const FeatureMatrix f = load_feature_matrix(path);
    *dim = static_cast<size_t>(f.dim());
    *count = static_cast<size_t>(f.count());
  });
}

tz_status tz_features_read(const char* path, double* out, size_t capacity) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const FeatureMatrix f = load_feature_matrix(path);
    if (capacity < static_cast<size_t>(f.values.size()))
      throw Error(Errc::InvalidArgument, "output buffer too small");
    std::memcpy(out, f.values.data(), sizeof(double) * static_cast<size_t>(f.values.size()));
  });
}

tz_status tz_zoo_load(const char* manifest_path, tz_zoo** out) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out, "out");
    *out = new tz_zoo{load_zoo(manifest_path)};
  });
}

void tz_zoo_free(tz_zoo* zoo) { delete zoo; }

size_t tz_zoo_size(const tz_zoo* zoo) { return zoo ? zoo->zoo.size() : 0; }

size_t tz_zoo_sample_count(const tz_zoo* zoo) {
  return zoo ? static_cast<size_t>(zoo->zoo.count()) : 0;
}

const char* tz_zoo_id(const tz_zoo* zoo, size_t index) {
  if (!zoo || index >= zoo->zoo.size()) return nullptr;
  return zoo->zoo.manifest().entries[index].id.c_str();
}

tz_status tz_kappa_estimate(const tz_zoo* zoo, const tz_kappa_options* options, tz_kappa** out) {
  return guarded([&] {
    require(zoo, "zoo");
    require(out, "out");
    *out = new tz_kappa{estimate_covariance(zoo->zoo, alignment(options))};
  });
}

tz_status tz_kappa_create(size_t n, const double* values, const char* const* ids, tz_kappa** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    if (n == 0) throw Error(Errc::InvalidArgument, "empty covariance");
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values, k, k);
    if (!m.allFinite()) throw Error(Errc::NonFiniteEntry, "covariance has non-finite entries");
    std::vector<std::string> names;
    if (ids)
      for (size_t i = 0; i < n; ++i) {
        require(ids[i], "id");
        names.emplace_back(ids[i]);
      }
    *out = new tz_kappa{TaskCovariance::from_matrix(std::move(m), std::move(names))};
  });
}

tz_status tz_kappa_load_json(const char* path, tz_kappa** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tz_kappa{load_covariance(path)};
  });
}

tz_status tz_kappa_parse_json(const char* text, tz_kappa** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new tz_kappa{covariance_from_json(text)};
  });
}

void tz_kappa_free(tz_kappa* kappa) { delete kappa; }

size_t tz_kappa_size(const tz_kappa* kappa) { return kappa ? kappa->kappa.size() : 0; }

double tz_kappa_get(const tz_kappa* kappa, size_t i, size_t j) {
  if (!kappa || i >= kappa->kappa.size() || j >= kappa->kappa.size())
    return std::numeric_limits<double>::quiet_NaN();
  return kappa->kappa(i, j);
}

const char* tz_kappa_id(const tz_kappa* kappa, size_t index) {
  if (!kappa || index >= kappa->kappa.size()) return nullptr;
  return kappa->kappa.ids[index].c_str();
}

tz_status tz_kappa_to_json(const tz_kappa* kappa, char** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    emit(out, covariance_to_json(kappa->kappa));
  });
}

tz_status tz_kappa_to_csv(const tz_kappa* kappa, char** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    emit(out, covariance_to_csv(kappa->kappa));
  });
}

tz_status tz_kappa_psd_report(const tz_kappa* kappa, tz_psd_report* out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    const PsdReport r = psd_report(kappa->kappa);
    *out = {r.min_eigenvalue, r.max_eigenvalue, r.violations};
  });
}

tz_status tz_kappa_report_json(const tz_kappa* kappa, char** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    const PsdReport r = psd_report(kappa->kappa);
    Json doc{{"n", kappa->kappa.size()},
             {"min_eigenvalue", r.min_eigenvalue},
             {"max_eigenvalue", r.max_eigenvalue},
             {"psd_violations", r.violations},
             {"eigenvalues", r.eigenvalues},
             {"invariant_violations", covariance_violations(kappa->kappa)}};
    emit(out, dump_canonical(doc));
  });
}

tz_status tz_conditional_variance(const tz_kappa* kappa, size_t index, const size_t* set,
                                  size_t set_size, double* out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = conditional_variance(kappa->kappa, index, index_set(set, set_size));
  });
}

tz_status tz_information_gain(const tz_kappa* kappa, size_t index, const size_t* set,
                              size_t set_size, tz_gain* out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = to_c(information_gain(kappa->kappa, index, index_set(set, set_size)));
  });
}

tz_status tz_mutual_information(const tz_kappa* kappa, const size_t* set, size_t set_size,
                                double* out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = mutual_information(kappa->kappa, index_set(set, set_size));
  });
}

tz_status tz_gaussian_kl(const tz_kappa* reference, const tz_kappa* estimate, double* out) {
  return guarded([&] {
    require(reference, "reference");
    require(estimate, "estimate");
    require(out, "out");
    *out = gaussian_kl(reference->kappa, estimate->kappa);
  });
}

tz_status tz_vec_cosine(const tz_kappa* a, const tz_kappa* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = vec_cosine(a->kappa, b->kappa);
  });
}

tz_status tz_select_mmi(const tz_kappa* kappa, size_t budget, int jobs, tz_trace** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = new tz_trace{select_mmi(kappa->kappa, budget, {jobs})};
  });
}

tz_status tz_select_brute_force(const tz_kappa* kappa, size_t budget, tz_trace** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = new tz_trace{brute_force_select(kappa->kappa, budget)};
  });
}

void tz_trace_free(tz_trace* trace) { delete trace; }

size_t tz_trace_size(const tz_trace* trace) { return trace ? trace->trace.picks.size() : 0; }

tz_status tz_trace_pick(const tz_trace* trace, size_t step, tz_gain* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    if (step >= trace->trace.picks.size()) throw Error(Errc::InvalidArgument, "step out of range");
    *out = to_c(trace->trace.picks[step]);
  });
}

double tz_trace_final_mi(const tz_trace* trace) {
  return trace ? trace->trace.final_mi : std::numeric_limits<double>::quiet_NaN();
}

int tz_trace_monotonic(const tz_trace* trace) { return trace && trace->trace.monotonic_regime ? 1 : 0; }

tz_status tz_trace_to_json(const tz_kappa* kappa, const tz_trace* trace, const tz_trace* oracle,
                           char** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(trace, "trace");
    require(out, "out");
    emit(out, trace_to_json(kappa->kappa, trace->trace, oracle ? &oracle->trace : nullptr));
  });
}

tz_status tz_greedy_quality_json(const tz_kappa* kappa, size_t max_budget, char** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    emit(out, quality_to_json(greedy_quality(kappa->kappa, max_budget)));
  });
}

tz_status tz_check_json(const tz_kappa* kappa, size_t trials, uint64_t seed, char** out,
                        size_t* violations) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    const TaskCovariance& k = kappa->kappa;
    std::vector<std::string> failed = covariance_violations(k);
    const PsdReport psd = psd_report(k);

    Json doc;
    doc["psd"] = {{"min_eigenvalue", psd.min_eigenvalue},
                  {"max_eigenvalue", psd.max_eigenvalue},
                  {"violations", psd.violations}};

    // MI symmetry on random subsets.
    std::size_t sym_fail = 0, sym_numeric = 0;
    double sym_worst = 0.0;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const std::size_t sym_trials = std::min<std::size_t>(trials, 100);
    for (std::size_t t = 0; t < sym_trials; ++t) {
      IndexSet s;
      for (std::size_t i = 0; i < k.size(); ++i)
        if (coin(rng)) s.insert(i);
      try {
        const double gap = std::abs(mutual_information(k, s) - mutual_information(k, s.complement(k.size())));
        sym_worst = std::max(sym_worst, gap);
        if (gap > 1e-9) ++sym_fail;
      } catch (const Error& e) {
        if (e.code() != Errc::SingularConditioning) throw;
        ++sym_numeric;
      }
    }
    doc["mi_symmetry"] = {{"trials", sym_trials},
                          {"violations", sym_fail},
                          {"numerical_failures", sym_numeric},
                          {"worst_gap", sym_worst}};
    if (sym_fail + sym_numeric > 0) failed.emplace_back("mi_symmetry");

    if (k.size() >= 3) {
      const SubmodularityReport sub = check_submodularity(k, trials, seed);
      doc["submodularity"] = Json::parse(submodularity_to_json(sub));
      if (!sub.clean()) failed.emplace_back("submodularity");
    }
    doc["failed"] = failed;
    doc["passed"] = failed.empty();
    if (violations) *violations = failed.size();
    emit(out, dump_canonical(doc));
  });
}

tz_status tz_cluster_ward(const tz_kappa* kappa, tz_dendrogram** out) {
  return guarded([&] {
    require(kappa, "kappa");
    require(out, "out");
    *out = new tz_dendrogram{ward_linkage(kappa->kappa)};
  });
}

void tz_dendrogram_free(tz_dendrogram* d) { delete d; }

size_t tz_dendrogram_leaves(const tz_dendrogram* d) { return d ? d->dendrogram.leaves() : 0; }

tz_status tz_dendrogram_cut(const tz_dendrogram* d, double threshold, size_t* labels) {
  return guarded([&] {
    require(d, "dendrogram");
    require(labels, "labels");
    const auto l = cut_dendrogram(d->dendrogram, threshold);
    std::copy(l.begin(), l.end(), labels);
  });
}

tz_status tz_dendrogram_to_json(const tz_dendrogram* d, double threshold, char** out) {
  return guarded([&] {
    require(d, "dendrogram");
    require(out, "out");
    if (threshold < 0) {
      emit(out, dendrogram_to_json(d->dendrogram));
    } else {
      const auto labels = cut_dendrogram(d->dendrogram, threshold);
      emit(out, dendrogram_to_json(d->dendrogram, &labels, threshold));
    }
  });
}

tz_status tz_dendrogram_to_newick(const tz_dendrogram* d, char** out) {
  return guarded([&] {
    require(d, "dendrogram");
    require(out, "out");
    emit(out, dendrogram_to_newick(d->dendrogram));
  });
}

tz_status tz_robustness(const tz_zoo* zoo, size_t steps, uint64_t seed, const tz_zoo* compare,
                        const tz_kappa_options* options, char** report_json, char** kl_csv,
                        char** cosine_csv) {
  return guarded([&] {
    require(zoo, "zoo");
    const auto schedule = nested_schedule(zoo->zoo.count(), steps, seed);
    const ConvergenceReport r =
        convergence_curve(zoo->zoo, schedule, alignment(options), compare ? &compare->zoo : nullptr);
    emit(report_json, convergence_to_json(r));
    emit(kl_csv, convergence_to_csv(r, true));
    emit(cosine_csv, convergence_to_csv(r, false));
  });
}

tz_status tz_bench_run(const char* config_json, int jobs, char** report_json, char** csv) {
  return guarded([&] {
    Json doc = Json::object();
    if (config_json && *config_json) {
      try {
        doc = Json::parse(config_json);
      } catch (const Json::parse_error& e) {
        throw Error(Errc::ConfigError, std::string("bench config: ") + e.what());
      }
    }
    if (!doc.is_object()) throw Error(Errc::ConfigError, "bench config must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (it.key() != "universe" && it.key() != "k" && it.key() != "random_seeds")
        throw Error(Errc::ConfigError, "unknown bench option '" + it.key() + "'");

    const TaskUniverseConfig cfg =
        doc.contains("universe") ? config_from_json(doc["universe"]) : TaskUniverseConfig{};
    std::vector<std::size_t> ks;
    if (doc.contains("k")) {
      if (!doc["k"].is_array()) throw Error(Errc::ConfigError, "'k' must be an array");
      for (const auto& v : doc["k"]) {
        if (!v.is_number_unsigned()) throw Error(Errc::ConfigError, "'k' entries must be positive integers");
        ks.push_back(v.get<std::size_t>());
      }
    } else {
      for (std::size_t k = 1; k <= std::min<std::size_t>(10, cfg.n_seen - 1); ++k) ks.push_back(k);
    }
    std::size_t seeds = 20;
    if (doc.contains("random_seeds")) {
      if (!doc["random_seeds"].is_number_unsigned())
        throw Error(Errc::ConfigError, "'random_seeds' must be a nonnegative integer");
      seeds = doc["random_seeds"].get<std::size_t>();
    }
    const TaskUniverse universe = generate_universe(cfg);
    const BenchReport report = run_bench(universe, ks, seeds, jobs);
    Json out = Json::parse(bench_to_json(report));
    out["universe"] = config_to_json(cfg);
    out["random_seeds"] = seeds;
    emit(report_json, dump_canonical(out));
    emit(csv, bench_to_csv(report));
  });
}

}  // extern "C"
