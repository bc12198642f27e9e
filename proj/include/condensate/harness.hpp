#pragma once

// Experiment configuration, dispatch, and file output for the CLI driver.
// A config is a single JSON document whose "kind" selects the experiment;
// every run writes data files plus a .meta.json sidecar so results can be
// traced back to the exact inputs that produced them.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "condensate/ip_sim.hpp"
#include "condensate/model.hpp"

namespace condensate {

// First line of every data file this tool writes.
inline constexpr const char* kFileTag = "# condensate-sim v1";

struct ExperimentConfig {
  // ip-sim | ode | wf | pd-sample | moments | verify | figure2
  std::string kind = "ip-sim";

  ModelParams model = ModelParams{RateSpec::inclusion(1, 1.0), 1.0};

  // particle-system runs: one output series per lattice size L,
  // with N = round(rho * L) particles
  std::vector<long long> sizes = {256};
  std::string initial = "single-pile";
  std::map<long long, long long> initial_histogram;

  // time grid shared by ip-sim, ode, wf, moments
  double horizon = 1.0;
  int grid_points = 31;

  // replica averaging; replica r uses the child stream
  // derive_seed(master_seed, replica_offset + r), so a 2k-replica run is
  // bit-for-bit the pool of two k-replica runs with offsets 0 and k
  int replicas = 1;
  std::uint64_t master_seed = 20260819;
  std::uint64_t replica_offset = 0;

  // observables for ip-sim output
  int phi_max = 3;
  int top_clusters = 0;

  // cluster-diffusion runs
  int wf_sites = 50;
  double wf_dt = 1e-3;
  int wf_paths = 10000;

  // stick-breaking sampler runs
  double pd_theta = 1.0;
  double pd_scale = 1.0;
  long long pd_samples = 100000;
  int pd_sticks = 0;  // 0 means pick the truncation depth automatically
  int pd_moment_max = 4;

  // moment-hierarchy runs
  std::vector<std::vector<int>> moment_targets = {{2}, {3}};
  int degree_cap = 6;

  // output
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  // canonical serialized form: parse(text) followed by canonical_text()
  // is byte-stable under further round trips
  std::string canonical_text() const;
  static ExperimentConfig load(const std::string& path);
};

// Per-replica observable series for one lattice size. values[r][t][c] is
// replica r at grid index t, column c of `columns`.
struct ReplicaSeries {
  std::vector<double> times;
  std::vector<std::string> columns;
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<std::uint64_t> events_per_replica;
};

ReplicaSeries run_ip_replicas(const ModelParams& params, long long L,
                              const InitialCondition& ic, double horizon,
                              int grid_points, int replicas,
                              std::uint64_t master_seed,
                              std::uint64_t replica_offset,
                              const ObservableSpec& what);

// One averaged column with its standard error (se is zero for a single
// replica). Pooling k-replica aggregates reproduces the 2k-replica
// aggregate exactly because sums run in replica order.
struct SeriesWithSE {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> se;
};

SeriesWithSE aggregate_column(const ReplicaSeries& series, size_t col);

// Sup-norm and z-score comparison of an averaged series against a
// reference curve on the same grid. Throws GridMismatch when the grids
// differ in length or position by more than 1e-12.
struct CompareReport {
  double sup_abs = 0.0;
  double max_z = 0.0;
};

CompareReport compare_series(const SeriesWithSE& series,
                             const std::vector<double>& ref_times,
                             const std::vector<double>& ref_values);

// Formats a double as the shortest %.17g text, the fixed width used by
// every writer here so identical inputs give identical bytes.
std::string format_g17(double v);

// Tabular payload shared by the csv and json writers: a tag line, named
// columns, and rows of doubles.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table_csv(const std::string& path, const Table& table);
void write_table_json(const std::string& path, const Table& table);

// Writes table in cfg.format and drops <path>.meta.json next to it with
// the config echo, seed, event counts, and wall time. Returns the data
// file path.
std::string write_output(const ExperimentConfig& cfg,
                         const std::string& stem, const Table& table,
                         const nlohmann::json& extra_meta,
                         double wall_seconds);

struct RunResult {
  std::vector<std::string> files;
  nlohmann::json summary;
  int exit_code = 0;
};

// Executes the experiment a config describes. Writes files under
// cfg.out_dir; returns headline numbers in summary. For kind "verify" the
// exit code is 2 when any acceptance check fails.
RunResult run_experiment(const ExperimentConfig& cfg);

// Initial control state for ode / wf / moments kinds: "empty" starts from
// the all-empty-sites state, "stationary" from the frozen profile. A
// histogram initial gives the normalized slow-site profile directly.
ControlState control_initial(const ExperimentConfig& cfg);

}  // namespace condensate
