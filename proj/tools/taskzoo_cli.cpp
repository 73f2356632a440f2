// SPDX-License-Identifier: Apache-2.0
//
// taskzoo command line. Every subcommand goes through the C API in
// taskzoo/taskzoo.h.
//
// Exit codes: 0 success, 2 input/validation error, 3 numerical or property
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "taskzoo/taskzoo.h"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  int code;
};

void check(tz_status status) {
  if (status == TZ_OK) return;
  std::cerr << "error: " << tz_last_error() << '\n';
  throw Failure{tz_status_exit_code(status)};
}

void fail_input(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  throw Failure{kExitInput};
}

struct CString {
  char* p = nullptr;
  ~CString() { tz_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Zoo = Handle<tz_zoo, tz_zoo_free>;
using Kappa = Handle<tz_kappa, tz_kappa_free>;
using Trace = Handle<tz_trace, tz_trace_free>;
using Dendrogram = Handle<tz_dendrogram, tz_dendrogram_free>;

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) fail_input(std::string(what) + " not found: " + path);
}

void require_writable(const std::string& path) {
  if (path.empty() || path == "-") return;
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty() && !std::filesystem::is_directory(dir))
    fail_input("output directory does not exist: " + dir.string());
}

// "-" or empty writes to stdout.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) fail_input("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string zoo, kappa, out = "-", csv, report, compare, config, newick, kl_csv, cosine_csv;
  std::size_t k = 1;
  std::size_t steps = 8;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double threshold = 0.9;
  bool oracle = false;
  bool center = false;
  int jobs = 1;
};

int cmd_kappa(const Options& o) {
  require_file(o.zoo, "zoo manifest");
  require_writable(o.out);
  require_writable(o.csv);
  require_writable(o.report);
  Zoo zoo;
  check(tz_zoo_load(o.zoo.c_str(), zoo.out()));
  const tz_kappa_options opts{o.center ? 1 : 0, o.jobs};
  Kappa kappa;
  check(tz_kappa_estimate(zoo.get(), &opts, kappa.out()));
  CString json, report;
  check(tz_kappa_to_json(kappa.get(), json.out()));
  check(tz_kappa_report_json(kappa.get(), report.out()));
  write_output(o.out, json.str());
  if (!o.csv.empty()) {
    CString csv;
    check(tz_kappa_to_csv(kappa.get(), csv.out()));
    write_output(o.csv, csv.str());
  }
  if (!o.report.empty()) write_output(o.report, report.str());
  tz_psd_report psd{};
  check(tz_kappa_psd_report(kappa.get(), &psd));
  std::cerr << "kappa: " << tz_kappa_size(kappa.get()) << " checkpoints, min eigenvalue "
            << psd.min_eigenvalue << ", psd violations " << psd.violations << '\n';
  return psd.violations == 0 ? 0 : kExitNumerical;
}

int cmd_select(const Options& o) {
  require_file(o.kappa, "kappa file");
  require_writable(o.out);
  require_writable(o.report);
  Kappa kappa;
  check(tz_kappa_load_json(o.kappa.c_str(), kappa.out()));
  Trace greedy;
  check(tz_select_mmi(kappa.get(), o.k, o.jobs, greedy.out()));
  Trace oracle;
  if (o.oracle) check(tz_select_brute_force(kappa.get(), o.k, oracle.out()));
  CString json;
  check(tz_trace_to_json(kappa.get(), greedy.get(), oracle.get(), json.out()));
  write_output(o.out, json.str());
  if (!o.report.empty()) {
    CString ratios;
    check(tz_greedy_quality_json(kappa.get(), o.k, ratios.out()));
    write_output(o.report, ratios.str());
  }
  if (!tz_trace_monotonic(greedy.get()))
    std::cerr << "note: some greedy gain is <= 0; the selection left the monotonic regime\n";
  return 0;
}

int cmd_cluster(const Options& o) {
  require_file(o.kappa, "kappa file");
  require_writable(o.out);
  require_writable(o.newick);
  if (o.threshold < 0) fail_input("threshold must be nonnegative");
  Kappa kappa;
  check(tz_kappa_load_json(o.kappa.c_str(), kappa.out()));
  Dendrogram tree;
  check(tz_cluster_ward(kappa.get(), tree.out()));
  CString json;
  check(tz_dendrogram_to_json(tree.get(), o.threshold, json.out()));
  write_output(o.out, json.str());
  if (!o.newick.empty()) {
    CString nwk;
    check(tz_dendrogram_to_newick(tree.get(), nwk.out()));
    write_output(o.newick, nwk.str());
  }
  return 0;
}

int cmd_robustness(const Options& o) {
  require_file(o.zoo, "zoo manifest");
  if (!o.compare.empty()) require_file(o.compare, "comparison manifest");
  require_writable(o.out);
  require_writable(o.kl_csv);
  require_writable(o.cosine_csv);
  Zoo zoo, other;
  check(tz_zoo_load(o.zoo.c_str(), zoo.out()));
  if (!o.compare.empty()) check(tz_zoo_load(o.compare.c_str(), other.out()));
  const tz_kappa_options opts{o.center ? 1 : 0, o.jobs};
  CString json, kl, cosine;
  check(tz_robustness(zoo.get(), o.steps, o.seed, other.get(), &opts, json.out(), kl.out(), cosine.out()));
  write_output(o.out, json.str());
  if (!o.kl_csv.empty()) write_output(o.kl_csv, kl.str());
  if (!o.cosine_csv.empty()) write_output(o.cosine_csv, cosine.str());
  return 0;
}

int cmd_bench(const Options& o) {
  std::string config;
  if (!o.config.empty()) {
    require_file(o.config, "bench config");
    config = read_file(o.config);
  }
  require_writable(o.out);
  require_writable(o.csv);
  CString json, csv;
  check(tz_bench_run(config.c_str(), o.jobs, json.out(), csv.out()));
  write_output(o.out, json.str());
  if (!o.csv.empty()) write_output(o.csv, csv.str());
  return 0;
}

int cmd_check(const Options& o) {
  require_file(o.kappa, "kappa file");
  require_writable(o.out);
  Kappa kappa;
  check(tz_kappa_load_json(o.kappa.c_str(), kappa.out()));
  CString json;
  std::size_t violations = 0;
  check(tz_check_json(kappa.get(), o.trials, o.seed, json.out(), &violations));
  write_output(o.out, json.str());
  if (violations > 0) {
    std::cerr << "check failed: " << violations << " invariant(s) violated, see report\n";
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checkpoint zoo task-space analysis and maximum-mutual-information selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tz_version()));
  Options o;

  auto* kappa = app.add_subcommand("kappa", "Estimate the task covariance from a zoo manifest");
  kappa->add_option("--zoo,manifest", o.zoo, "Zoo manifest JSON")->required();
  kappa->add_option("--out", o.out, "Output kappa JSON ('-' for stdout)");
  kappa->add_option("--csv", o.csv, "Also write kappa as CSV");
  kappa->add_option("--report", o.report, "Write the PSD/invariant report JSON");
  kappa->add_flag("--center", o.center, "Center features over probing samples");
  kappa->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* select = app.add_subcommand("select", "Greedy MMI checkpoint selection");
  select->add_option("--kappa", o.kappa, "Kappa JSON")->required();
  select->add_option("--k", o.k, "Budget K")->required();
  select->add_flag("--oracle", o.oracle, "Also run the exact brute-force optimum");
  select->add_option("--report", o.report, "Write per-K greedy/optimal ratios JSON");
  select->add_option("--out", o.out, "Output trace JSON ('-' for stdout)");
  select->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* cluster = app.add_subcommand("cluster", "Ward hierarchical clustering of kappa");
  cluster->add_option("--kappa", o.kappa, "Kappa JSON")->required();
  cluster->add_option("--threshold", o.threshold, "Flat-cluster cut height")->capture_default_str();
  cluster->add_option("--out", o.out, "Output dendrogram JSON ('-' for stdout)");
  cluster->add_option("--newick", o.newick, "Also write a Newick tree");

  auto* robust = app.add_subcommand("robustness", "Convergence of kappa with probing-data size");
  robust->add_option("--zoo", o.zoo, "Zoo manifest JSON")->required();
  robust->add_option("--steps", o.steps, "Nested subset count")->capture_default_str();
  robust->add_option("--seed", o.seed, "Subset permutation seed")->capture_default_str();
  robust->add_option("--compare", o.compare, "Reference kappa from this zoo's full data");
  robust->add_option("--out", o.out, "Output report JSON ('-' for stdout)");
  robust->add_option("--kl-csv", o.kl_csv, "Write size,kl CSV");
  robust->add_option("--cosine-csv", o.cosine_csv, "Write size,cosine CSV");
  robust->add_flag("--center", o.center, "Center features over probing samples");
  robust->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Synthetic transfer benchmark: MMI vs random vs peek");
  bench->add_option("--config", o.config, "Bench config JSON (defaults when omitted)");
  bench->add_option("--out", o.out, "Output report JSON ('-' for stdout)");
  bench->add_option("--csv", o.csv, "Also write per-K CSV");
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* chk = app.add_subcommand("check", "Runtime property checks on a kappa file");
  chk->add_option("--kappa", o.kappa, "Kappa JSON")->required();
  chk->add_option("--trials", o.trials, "Submodularity trials")->capture_default_str();
  chk->add_option("--seed", o.seed, "Trial seed")->capture_default_str();
  chk->add_option("--out", o.out, "Output report JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (kappa->parsed()) return cmd_kappa(o);
    if (select->parsed()) return cmd_select(o);
    if (cluster->parsed()) return cmd_cluster(o);
    if (robust->parsed()) return cmd_robustness(o);
    if (bench->parsed()) return cmd_bench(o);
    if (chk->parsed()) return cmd_check(o);
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitInput;
}
