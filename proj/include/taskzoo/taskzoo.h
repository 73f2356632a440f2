/* SPDX-License-Identifier: Apache-2.0 */
#ifndef TASKZOO_TASKZOO_H
#define TASKZOO_TASKZOO_H

/*
 * C interface to the taskzoo library: task-space covariance estimation from
 * checkpoint features, greedy maximum-mutual-information checkpoint
 * selection, clustering, robustness curves and the synthetic benchmark.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns a tz_status; on failure tz_last_error() holds a
 * message for the calling thread. Strings returned through char** are
 * heap-allocated and must be released with tz_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TASKZOO_BUILDING)
#    define TZ_API __declspec(dllexport)
#  else
#    define TZ_API __declspec(dllimport)
#  endif
#else
#  define TZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tz_status {
  TZ_OK = 0,
  TZ_ERR_INVALID_ARGUMENT = 1,
  TZ_ERR_IO = 2,
  TZ_ERR_MALFORMED_FILE = 3,
  TZ_ERR_NON_FINITE = 4,
  TZ_ERR_COUNT_MISMATCH = 5,
  TZ_ERR_DUPLICATE_ID = 6,
  TZ_ERR_EMPTY_ZOO = 7,
  TZ_ERR_ZERO_GRAM = 8,
  TZ_ERR_DIMENSION_MISMATCH = 9,
  TZ_ERR_SINGULAR = 10,
  TZ_ERR_BUDGET = 11,
  TZ_ERR_TOO_LARGE = 12,
  TZ_ERR_BAD_SCHEDULE = 13,
  TZ_ERR_CONFIG = 14,
  TZ_ERR_DEGENERATE_LABELS = 15,
  TZ_ERR_INVARIANT = 16,
  TZ_ERR_INTERNAL = 99
} tz_status;

typedef struct tz_zoo tz_zoo;
typedef struct tz_kappa tz_kappa;
typedef struct tz_trace tz_trace;
typedef struct tz_dendrogram tz_dendrogram;

TZ_API const char* tz_version(void);
TZ_API const char* tz_status_name(tz_status status);
/* Process exit code for a status: 0 ok, 3 numerical/property failure, 2 otherwise. */
TZ_API int tz_status_exit_code(tz_status status);
TZ_API const char* tz_last_error(void);
TZ_API void tz_string_free(char* s);

/* ---- feature files and zoos ---- */

/* Writes an FMX1 file from a column-major dim x count buffer. */
TZ_API tz_status tz_fmx1_write(const char* path, size_t dim, size_t count, const double* values);
/* Reads the shape of an FMX1 or CSV feature file. */
TZ_API tz_status tz_features_shape(const char* path, size_t* dim, size_t* count);
/* Copies the dim x count matrix, column-major, into out (capacity >= dim*count). */
TZ_API tz_status tz_features_read(const char* path, double* out, size_t capacity);

TZ_API tz_status tz_zoo_load(const char* manifest_path, tz_zoo** out);
TZ_API void tz_zoo_free(tz_zoo* zoo);
TZ_API size_t tz_zoo_size(const tz_zoo* zoo);
TZ_API size_t tz_zoo_sample_count(const tz_zoo* zoo);
TZ_API const char* tz_zoo_id(const tz_zoo* zoo, size_t index);

/* ---- task covariance ---- */

typedef struct tz_kappa_options {
  int center; /* nonzero: centered Gram matrices */
  int jobs;   /* worker threads, <= 1 runs inline */
} tz_kappa_options;

TZ_API tz_status tz_kappa_estimate(const tz_zoo* zoo, const tz_kappa_options* options, tz_kappa** out);
/* values is row-major n x n; ids may be NULL for "0", "1", ... */
TZ_API tz_status tz_kappa_create(size_t n, const double* values, const char* const* ids, tz_kappa** out);
TZ_API tz_status tz_kappa_load_json(const char* path, tz_kappa** out);
TZ_API tz_status tz_kappa_parse_json(const char* text, tz_kappa** out);
TZ_API void tz_kappa_free(tz_kappa* kappa);
TZ_API size_t tz_kappa_size(const tz_kappa* kappa);
TZ_API double tz_kappa_get(const tz_kappa* kappa, size_t i, size_t j);
TZ_API const char* tz_kappa_id(const tz_kappa* kappa, size_t index);
TZ_API tz_status tz_kappa_to_json(const tz_kappa* kappa, char** out);
TZ_API tz_status tz_kappa_to_csv(const tz_kappa* kappa, char** out);

typedef struct tz_psd_report {
  double min_eigenvalue;
  double max_eigenvalue;
  size_t violations; /* eigenvalues below -1e-8 */
} tz_psd_report;

TZ_API tz_status tz_kappa_psd_report(const tz_kappa* kappa, tz_psd_report* out);
/* JSON object with eigenvalues, PSD summary and violated invariants. */
TZ_API tz_status tz_kappa_report_json(const tz_kappa* kappa, char** out);

/* ---- Gaussian-process quantities (nats) ---- */

TZ_API tz_status tz_conditional_variance(const tz_kappa* kappa, size_t index, const size_t* set,
                                         size_t set_size, double* out);

typedef struct tz_gain {
  size_t index;
  double delta;
  double numerator_variance;
  double denominator_variance;
} tz_gain;

TZ_API tz_status tz_information_gain(const tz_kappa* kappa, size_t index, const size_t* set,
                                     size_t set_size, tz_gain* out);
TZ_API tz_status tz_mutual_information(const tz_kappa* kappa, const size_t* set, size_t set_size,
                                       double* out);
/* KL(N(0, reference) || N(0, estimate)). */
TZ_API tz_status tz_gaussian_kl(const tz_kappa* reference, const tz_kappa* estimate, double* out);
TZ_API tz_status tz_vec_cosine(const tz_kappa* a, const tz_kappa* b, double* out);

/* ---- selection ---- */

TZ_API tz_status tz_select_mmi(const tz_kappa* kappa, size_t budget, int jobs, tz_trace** out);
TZ_API tz_status tz_select_brute_force(const tz_kappa* kappa, size_t budget, tz_trace** out);
TZ_API void tz_trace_free(tz_trace* trace);
TZ_API size_t tz_trace_size(const tz_trace* trace);
TZ_API tz_status tz_trace_pick(const tz_trace* trace, size_t step, tz_gain* out);
TZ_API double tz_trace_final_mi(const tz_trace* trace);
TZ_API int tz_trace_monotonic(const tz_trace* trace);
/* oracle may be NULL; when given, the JSON carries it and the MI ratio. */
TZ_API tz_status tz_trace_to_json(const tz_kappa* kappa, const tz_trace* trace, const tz_trace* oracle,
                                  char** out);
/* Per-budget greedy/optimal MI ratios for budgets 1..max_budget. */
TZ_API tz_status tz_greedy_quality_json(const tz_kappa* kappa, size_t max_budget, char** out);

/* Runtime property checks: PSD, covariance invariants, MI symmetry and
 * randomized submodularity. *violations receives the number of failed checks. */
TZ_API tz_status tz_check_json(const tz_kappa* kappa, size_t trials, uint64_t seed, char** out,
                               size_t* violations);

/* ---- clustering ---- */

TZ_API tz_status tz_cluster_ward(const tz_kappa* kappa, tz_dendrogram** out);
TZ_API void tz_dendrogram_free(tz_dendrogram* d);
TZ_API size_t tz_dendrogram_leaves(const tz_dendrogram* d);
/* labels must hold tz_dendrogram_leaves(d) entries. */
TZ_API tz_status tz_dendrogram_cut(const tz_dendrogram* d, double threshold, size_t* labels);
/* threshold < 0 omits the flat clusters from the JSON. */
TZ_API tz_status tz_dendrogram_to_json(const tz_dendrogram* d, double threshold, char** out);
TZ_API tz_status tz_dendrogram_to_newick(const tz_dendrogram* d, char** out);

/* ---- robustness ---- */

/* compare may be NULL. Outputs may be NULL when not wanted. */
TZ_API tz_status tz_robustness(const tz_zoo* zoo, size_t steps, uint64_t seed, const tz_zoo* compare,
                               const tz_kappa_options* options, char** report_json, char** kl_csv,
                               char** cosine_csv);

/* ---- synthetic benchmark ---- */

/* config_json: {"universe": {...}, "k": [...], "random_seeds": N}; every key
 * optional. Outputs may be NULL when not wanted. */
TZ_API tz_status tz_bench_run(const char* config_json, int jobs, char** report_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* TASKZOO_TASKZOO_H */
