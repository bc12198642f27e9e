#include "condensate/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "condensate/acceptance.hpp"
#include "condensate/control_ode.hpp"
#include "condensate/errors.hpp"
#include "condensate/moment_oracle.hpp"
#include "condensate/pd_diffusion.hpp"
#include "condensate/rng.hpp"

namespace condensate {

namespace {

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds = {
      "ip-sim", "ode", "wf", "pd-sample", "moments", "verify", "figure2"};
  return kinds;
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(std::string(where) + ": unknown key \"" + it.key() +
                        "\"");
    }
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// short %g form used for column names, where full precision is noise
std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!known_kinds().count(kind)) {
    throw ConfigError("config: unknown kind \"" + kind + "\"");
  }
  model.validate();
  if (sizes.empty()) throw ConfigError("config: sizes must not be empty");
  for (long long L : sizes) {
    if (L < 1 || L > std::numeric_limits<int>::max()) {
      throw ConfigError("config: lattice size out of range: " +
                        std::to_string(L));
    }
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("config: horizon must be positive and finite");
  }
  if (grid_points < 2) throw ConfigError("config: grid_points must be >= 2");
  if (replicas < 1) throw ConfigError("config: replicas must be >= 1");
  if (phi_max != 0 && phi_max < 2) {
    throw ConfigError("config: phi_max must be 0 or >= 2");
  }
  if (top_clusters < 0) throw ConfigError("config: top_clusters must be >= 0");
  if (wf_sites < 2) throw ConfigError("config: wf_sites must be >= 2");
  if (!(wf_dt > 0.0)) throw ConfigError("config: wf_dt must be positive");
  if (wf_paths < 1) throw ConfigError("config: wf_paths must be >= 1");
  if (!(pd_theta > 0.0)) throw ConfigError("config: pd_theta must be positive");
  if (pd_scale < 0.0 || pd_scale > 1.0) {
    throw ConfigError("config: pd_scale must lie in [0, 1]");
  }
  if (pd_samples < 1) throw ConfigError("config: pd_samples must be >= 1");
  if (pd_sticks < 0) throw ConfigError("config: pd_sticks must be >= 0");
  if (pd_moment_max < 2) {
    throw ConfigError("config: pd_moment_max must be >= 2");
  }
  if (moment_targets.empty()) {
    throw ConfigError("config: moment_targets must not be empty");
  }
  if (degree_cap < 2) throw ConfigError("config: degree_cap must be >= 2");
  if (format != "csv" && format != "json") {
    throw ConfigError("config: format must be csv or json");
  }
  if (out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
  for (const auto& [k, c] : initial_histogram) {
    if (k < 0 || c < 0) {
      throw ConfigError("config: initial_histogram entries must be >= 0");
    }
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["model"] = model;
  j["sizes"] = sizes;
  j["initial"] = initial;
  if (!initial_histogram.empty()) {
    j["initial_histogram"] = histogram_to_string(initial_histogram);
  }
  j["horizon"] = horizon;
  j["grid_points"] = grid_points;
  j["replicas"] = replicas;
  j["master_seed"] = master_seed;
  j["replica_offset"] = replica_offset;
  j["phi_max"] = phi_max;
  j["top_clusters"] = top_clusters;
  j["wf_sites"] = wf_sites;
  j["wf_dt"] = wf_dt;
  j["wf_paths"] = wf_paths;
  j["pd_theta"] = pd_theta;
  j["pd_scale"] = pd_scale;
  j["pd_samples"] = pd_samples;
  j["pd_sticks"] = pd_sticks;
  j["pd_moment_max"] = pd_moment_max;
  j["moment_targets"] = moment_targets;
  j["degree_cap"] = degree_cap;
  j["out_dir"] = out_dir;
  j["format"] = format;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(
      j,
      {"kind",          "model",        "sizes",          "initial",
       "initial_histogram", "horizon",  "grid_points",    "replicas",
       "master_seed",   "replica_offset", "phi_max",      "top_clusters",
       "wf_sites",      "wf_dt",        "wf_paths",       "pd_theta",
       "pd_scale",      "pd_samples",   "pd_sticks",      "pd_moment_max",
       "moment_targets", "degree_cap",  "out_dir",        "format"},
      "config");
  ExperimentConfig cfg;
  try {
    if (j.contains("kind")) cfg.kind = j.at("kind").get<std::string>();
    if (j.contains("model")) cfg.model = j.at("model").get<ModelParams>();
    if (j.contains("sizes")) {
      cfg.sizes = j.at("sizes").get<std::vector<long long>>();
    }
    if (j.contains("initial")) {
      cfg.initial = j.at("initial").get<std::string>();
    }
    if (j.contains("initial_histogram")) {
      cfg.initial_histogram =
          histogram_from_string(j.at("initial_histogram").get<std::string>());
    }
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<double>();
    if (j.contains("grid_points")) {
      cfg.grid_points = j.at("grid_points").get<int>();
    }
    if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<int>();
    if (j.contains("master_seed")) {
      cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("replica_offset")) {
      cfg.replica_offset = j.at("replica_offset").get<std::uint64_t>();
    }
    if (j.contains("phi_max")) cfg.phi_max = j.at("phi_max").get<int>();
    if (j.contains("top_clusters")) {
      cfg.top_clusters = j.at("top_clusters").get<int>();
    }
    if (j.contains("wf_sites")) cfg.wf_sites = j.at("wf_sites").get<int>();
    if (j.contains("wf_dt")) cfg.wf_dt = j.at("wf_dt").get<double>();
    if (j.contains("wf_paths")) cfg.wf_paths = j.at("wf_paths").get<int>();
    if (j.contains("pd_theta")) cfg.pd_theta = j.at("pd_theta").get<double>();
    if (j.contains("pd_scale")) cfg.pd_scale = j.at("pd_scale").get<double>();
    if (j.contains("pd_samples")) {
      cfg.pd_samples = j.at("pd_samples").get<long long>();
    }
    if (j.contains("pd_sticks")) cfg.pd_sticks = j.at("pd_sticks").get<int>();
    if (j.contains("pd_moment_max")) {
      cfg.pd_moment_max = j.at("pd_moment_max").get<int>();
    }
    if (j.contains("moment_targets")) {
      cfg.moment_targets =
          j.at("moment_targets").get<std::vector<std::vector<int>>>();
    }
    if (j.contains("degree_cap")) {
      cfg.degree_cap = j.at("degree_cap").get<int>();
    }
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::canonical_text() const {
  return to_json().dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

ControlState control_initial(const ExperimentConfig& cfg) {
  const int A = cfg.model.spec.A;
  if (cfg.initial == "histogram") {
    if (cfg.initial_histogram.empty()) {
      throw ConfigError("initial histogram requested but none given");
    }
    long long total = 0;
    for (const auto& [k, c] : cfg.initial_histogram) {
      if (k > A) {
        throw ConfigError(
            "control runs take histograms over occupations 0.." +
            std::to_string(A));
      }
      total += c;
    }
    if (total <= 0) throw ConfigError("initial histogram is empty");
    ControlState y;
    y.y.assign(static_cast<size_t>(A), 0.0);
    for (const auto& [k, c] : cfg.initial_histogram) {
      if (k < A) {
        y.y[static_cast<size_t>(k)] =
            static_cast<double>(c) / static_cast<double>(total);
      }
    }
    return y;
  }
  if (cfg.initial == "empty" || cfg.initial == "single-pile") {
    // a single macroscopic pile carries no site mass in the limit, so both
    // names start the flow from the all-empty profile
    return empty_sites_state(A);
  }
  if (cfg.initial == "stationary" || cfg.initial == "slow-equilibrium") {
    const std::vector<double> ybar = fixed_point_ybar(cfg.model.spec);
    ControlState y;
    y.y.assign(ybar.begin(), ybar.end() - 1);
    return y;
  }
  if (cfg.initial == "all-ones") {
    ControlState y;
    y.y.assign(static_cast<size_t>(A), 0.0);
    if (A >= 2) y.y[1] = 1.0;
    return y;
  }
  throw ConfigError(
      "control runs accept initial = empty | stationary | all-ones | "
      "histogram, got \"" +
      cfg.initial + "\"");
}

ReplicaSeries run_ip_replicas(const ModelParams& params, long long L,
                              const InitialCondition& ic, double horizon,
                              int grid_points, int replicas,
                              std::uint64_t master_seed,
                              std::uint64_t replica_offset,
                              const ObservableSpec& what) {
  params.validate();
  if (L < 1 || L > std::numeric_limits<int>::max()) {
    throw ConfigError("lattice size out of range");
  }
  const long long N = std::llround(params.rho * static_cast<double>(L));
  const std::vector<double> grid = uniform_grid(horizon, grid_points);
  ReplicaSeries out;
  out.values.reserve(static_cast<size_t>(replicas));
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t seed =
        derive_seed(master_seed, replica_offset + static_cast<std::uint64_t>(r));
    SimState sim(params.spec, static_cast<int>(L), N, ic, seed);
    SeriesBlock blk = observe_path(sim, grid, what);
    if (r == 0) {
      out.times = blk.times;
      out.columns = blk.columns;
    }
    out.values.push_back(std::move(blk.rows));
    out.events_per_replica.push_back(sim.events());
  }
  return out;
}

SeriesWithSE aggregate_column(const ReplicaSeries& series, size_t col) {
  const size_t R = series.values.size();
  const size_t T = series.times.size();
  if (R == 0) throw ConfigError("aggregate_column: no replicas");
  if (col >= series.columns.size()) {
    throw ConfigError("aggregate_column: column index out of range");
  }
  SeriesWithSE out;
  out.times = series.times;
  out.mean.assign(T, 0.0);
  out.se.assign(T, 0.0);
  for (size_t t = 0; t < T; ++t) {
    // plain left to right sums so that pooling replica blocks reproduces a
    // single larger run bit for bit
    double sum = 0.0;
    for (size_t r = 0; r < R; ++r) sum += series.values[r][t][col];
    const double mean = sum / static_cast<double>(R);
    out.mean[t] = mean;
    if (R > 1) {
      double ss = 0.0;
      for (size_t r = 0; r < R; ++r) {
        const double d = series.values[r][t][col] - mean;
        ss += d * d;
      }
      out.se[t] = std::sqrt(ss / (static_cast<double>(R) *
                                  static_cast<double>(R - 1)));
    }
  }
  return out;
}

CompareReport compare_series(const SeriesWithSE& series,
                             const std::vector<double>& ref_times,
                             const std::vector<double>& ref_values) {
  if (series.times.size() != ref_times.size() ||
      ref_times.size() != ref_values.size()) {
    throw GridMismatch("compare_series: grids have different lengths");
  }
  CompareReport rep;
  for (size_t i = 0; i < ref_times.size(); ++i) {
    if (std::abs(series.times[i] - ref_times[i]) > 1e-12) {
      throw GridMismatch("compare_series: grid times differ at index " +
                         std::to_string(i));
    }
    const double diff = std::abs(series.mean[i] - ref_values[i]);
    rep.sup_abs = std::max(rep.sup_abs, diff);
    double z;
    if (series.se[i] > 0.0) {
      z = diff / series.se[i];
    } else {
      z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    rep.max_z = std::max(rep.max_z, z);
  }
  return rep;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_table_csv(const std::string& path, const Table& table) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << kFileTag << "\n";
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) f << ",";
    f << table.columns[c];
  }
  f << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("csv row width does not match header");
    }
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) f << ",";
      f << format_g17(row[c]);
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_table_json(const std::string& path, const Table& table) {
  nlohmann::json j;
  j["format"] = "condensate-sim v1";
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string write_output(const ExperimentConfig& cfg, const std::string& stem,
                         const Table& table, const nlohmann::json& extra_meta,
                         double wall_seconds) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path =
      cfg.out_dir + "/" + stem + (cfg.format == "json" ? ".json" : ".csv");
  if (cfg.format == "json") {
    write_table_json(path, table);
  } else {
    write_table_csv(path, table);
  }
  nlohmann::json meta;
  meta["config"] = cfg.to_json();
  meta["master_seed"] = cfg.master_seed;
  meta["wall_seconds"] = wall_seconds;
  if (extra_meta.is_object()) {
    for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) {
      meta[it.key()] = it.value();
    }
  }
  const std::string meta_path = path + ".meta.json";
  std::ofstream mf(meta_path);
  if (!mf) throw std::runtime_error("cannot open for writing: " + meta_path);
  mf << meta.dump(2) << "\n";
  if (!mf) throw std::runtime_error("write failed: " + meta_path);
  return path;
}

namespace {

KingmanVector single_cluster_initial(const ModelParams& params,
                                     const ControlState& y0) {
  const double g = gamma_of_y(params, y0);
  KingmanVector x;
  if (g > 0.0) x.push_back(g);
  return x;
}

RunResult run_ip_sim(const ExperimentConfig& cfg) {
  RunResult res;
  ObservableSpec what;
  what.phi_max = cfg.phi_max;
  what.top_clusters = cfg.top_clusters;
  InitialCondition ic = InitialCondition::parse(cfg.initial);
  if (ic.kind == InitKind::Histogram) ic.histogram = cfg.initial_histogram;
  res.summary["runs"] = nlohmann::json::array();
  for (long long L : cfg.sizes) {
    const auto t0 = std::chrono::steady_clock::now();
    ReplicaSeries rs =
        run_ip_replicas(cfg.model, L, ic, cfg.horizon, cfg.grid_points,
                        cfg.replicas, cfg.master_seed, cfg.replica_offset, what);
    Table tab;
    tab.columns.push_back("t");
    std::vector<SeriesWithSE> agg;
    agg.reserve(rs.columns.size());
    for (size_t c = 0; c < rs.columns.size(); ++c) {
      tab.columns.push_back(rs.columns[c] + "_mean");
      tab.columns.push_back(rs.columns[c] + "_se");
      agg.push_back(aggregate_column(rs, c));
    }
    tab.rows.reserve(rs.times.size());
    for (size_t t = 0; t < rs.times.size(); ++t) {
      std::vector<double> row;
      row.reserve(tab.columns.size());
      row.push_back(rs.times[t]);
      for (const auto& a : agg) {
        row.push_back(a.mean[t]);
        row.push_back(a.se[t]);
      }
      tab.rows.push_back(std::move(row));
    }
    nlohmann::json extra;
    extra["L"] = L;
    extra["N"] = std::llround(cfg.model.rho * static_cast<double>(L));
    extra["initial"] = ic.name();
    extra["events_per_replica"] = rs.events_per_replica;
    const std::string path =
        write_output(cfg, "ip_sim_L" + std::to_string(L), tab, extra,
                     elapsed_seconds(t0));
    res.files.push_back(path);
    nlohmann::json run;
    run["L"] = L;
    run["file"] = path;
    for (size_t c = 0; c < rs.columns.size(); ++c) {
      run["final"][rs.columns[c]] = agg[c].mean.back();
    }
    res.summary["runs"].push_back(run);
  }
  return res;
}

RunResult run_ode(const ExperimentConfig& cfg) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const ControlState y0 = control_initial(cfg);
  const std::vector<double> grid = uniform_grid(cfg.horizon, cfg.grid_points);
  const OdeSolution sol = integrate(cfg.model, y0, grid);
  const int A = cfg.model.spec.A;
  Table tab;
  tab.columns.push_back("t");
  for (int k = 0; k < A; ++k) tab.columns.push_back("y_" + std::to_string(k));
  tab.columns.push_back("gamma");
  tab.columns.push_back("theta");
  tab.columns.push_back("beta");
  for (size_t i = 0; i < sol.times.size(); ++i) {
    std::vector<double> row;
    row.push_back(sol.times[i]);
    for (int k = 0; k < A; ++k) {
      row.push_back(sol.states[i].y[static_cast<size_t>(k)]);
    }
    row.push_back(sol.gamma[i]);
    row.push_back(sol.theta[i]);
    row.push_back(beta_bar(cfg.model.spec, sol.states[i]));
    tab.rows.push_back(std::move(row));
  }
  nlohmann::json extra;
  extra["step"] = sol.h;
  extra["max_simplex_violation"] = sol.max_violation;
  const std::string path =
      write_output(cfg, "ode", tab, extra, elapsed_seconds(t0));
  res.files.push_back(path);
  res.summary["gamma_final"] = sol.gamma.back();
  res.summary["rho_crit"] = rho_crit(cfg.model.spec);
  res.summary["gamma_infinity"] = cfg.model.gamma_bar();
  return res;
}

RunResult run_wf(const ExperimentConfig& cfg) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const ControlState y0 = control_initial(cfg);
  const KingmanVector x0 = single_cluster_initial(cfg.model, y0);
  const std::vector<double> grid = uniform_grid(cfg.horizon, cfg.grid_points);
  const WfMomentSeries ms =
      run_wf_moments(cfg.model, y0, x0, cfg.wf_sites, cfg.wf_dt, grid,
                     cfg.wf_paths, cfg.master_seed);
  Table tab;
  tab.columns = {"t",       "phi2_mean", "phi2_se", "phi3_mean",
                 "phi3_se", "gamma",     "theta"};
  for (size_t i = 0; i < ms.times.size(); ++i) {
    tab.rows.push_back({ms.times[i], ms.phi2_mean[i], ms.phi2_se[i],
                        ms.phi3_mean[i], ms.phi3_se[i], ms.gamma[i],
                        ms.theta[i]});
  }
  nlohmann::json extra;
  extra["paths"] = ms.paths;
  extra["sites"] = cfg.wf_sites;
  extra["dt"] = cfg.wf_dt;
  extra["guard_fraction"] = ms.guard_fraction;
  const std::string path =
      write_output(cfg, "wf", tab, extra, elapsed_seconds(t0));
  res.files.push_back(path);
  res.summary["phi2_final"] = ms.phi2_mean.back();
  res.summary["phi3_final"] = ms.phi3_mean.back();
  res.summary["guard_fraction"] = ms.guard_fraction;
  return res;
}

RunResult run_pd_sample(const ExperimentConfig& cfg) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const int sticks =
      cfg.pd_sticks > 0 ? cfg.pd_sticks : default_stick_count(cfg.pd_theta);
  RngStream rng(derive_seed(cfg.master_seed, 0));
  const int n_m = cfg.pd_moment_max - 1;
  std::vector<double> mean(static_cast<size_t>(n_m), 0.0);
  std::vector<double> m2(static_cast<size_t>(n_m), 0.0);
  for (long long i = 0; i < cfg.pd_samples; ++i) {
    const PdSample s = sample_pd_scaled(cfg.pd_theta, cfg.pd_scale, sticks, rng);
    for (int m = 2; m <= cfg.pd_moment_max; ++m) {
      const size_t idx = static_cast<size_t>(m - 2);
      const double v = phi_m(s.x, m);
      const double d = v - mean[idx];
      mean[idx] += d / static_cast<double>(i + 1);
      m2[idx] += d * (v - mean[idx]);
    }
  }
  Table tab;
  tab.columns = {"m", "phi_mean", "phi_se", "phi_exact"};
  double worst_z = 0.0;
  for (int m = 2; m <= cfg.pd_moment_max; ++m) {
    const size_t idx = static_cast<size_t>(m - 2);
    const double n = static_cast<double>(cfg.pd_samples);
    const double se = cfg.pd_samples > 1
                          ? std::sqrt(m2[idx] / ((n - 1.0) * n))
                          : 0.0;
    const double exact = pd_moment(m, cfg.pd_theta, cfg.pd_scale);
    tab.rows.push_back({static_cast<double>(m), mean[idx], se, exact});
    if (se > 0.0) worst_z = std::max(worst_z, std::abs(mean[idx] - exact) / se);
  }
  nlohmann::json extra;
  extra["samples"] = cfg.pd_samples;
  extra["sticks"] = sticks;
  extra["theta"] = cfg.pd_theta;
  extra["scale"] = cfg.pd_scale;
  const std::string path =
      write_output(cfg, "pd_sample", tab, extra, elapsed_seconds(t0));
  res.files.push_back(path);
  res.summary["worst_z"] = worst_z;
  return res;
}

RunResult run_moments(const ExperimentConfig& cfg) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<MonomialIndex> targets;
  targets.reserve(cfg.moment_targets.size());
  for (const auto& t : cfg.moment_targets) {
    targets.push_back(MonomialIndex::of(t));
  }
  const MomentSystem sys = build_moment_system(targets, cfg.degree_cap);
  const ControlState y0 = control_initial(cfg);
  const KingmanVector x0 = single_cluster_initial(cfg.model, y0);
  const std::vector<double> grid = uniform_grid(cfg.horizon, cfg.grid_points);
  const MomentTrack track = solve_hierarchy(sys, cfg.model, y0, x0, grid);
  Table tab;
  tab.columns.push_back("t");
  for (const auto& idx : track.indices) tab.columns.push_back(idx.label());
  tab.columns.push_back("gamma");
  tab.columns.push_back("theta");
  for (size_t i = 0; i < track.times.size(); ++i) {
    std::vector<double> row;
    row.push_back(track.times[i]);
    for (double v : track.values[i]) row.push_back(v);
    row.push_back(track.gamma[i]);
    row.push_back(track.theta[i]);
    tab.rows.push_back(std::move(row));
  }
  nlohmann::json extra;
  extra["closure_size"] = track.indices.size();
  const std::string path =
      write_output(cfg, "moments", tab, extra, elapsed_seconds(t0));
  res.files.push_back(path);
  for (const auto& t : targets) {
    const int flat = sys.index_of(t);
    if (flat >= 0) {
      res.summary["final"][t.label()] =
          track.values.back()[static_cast<size_t>(flat)];
    }
  }
  return res;
}

RunResult run_figure2(const ExperimentConfig& cfg) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const RateSpec& spec = cfg.model.spec;
  if (spec.A != 1) throw ConfigError("figure2 requires A = 1");
  const double th = spec.q_at(1);
  if (std::abs(spec.r_at(0) - th) > 1e-12 ||
      std::abs(spec.r_at(1) - th) > 1e-12) {
    throw ConfigError("figure2 requires q_1 = r_0 = r_1");
  }
  const double rho = cfg.model.rho;
  const std::vector<double> gamma0 = {0.025, 0.25, 0.65, 1.0};
  const std::vector<double> grid = uniform_grid(cfg.horizon, cfg.grid_points);
  Table tab;
  tab.columns.push_back("t");
  tab.rows.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) tab.rows[i].push_back(grid[i]);
  for (double g0 : gamma0) {
    const double y0v = 1.0 - rho * (1.0 - g0);
    if (y0v < -1e-12) {
      throw ConfigError("figure2: gamma(0) = " + format_g(g0) +
                        " is not reachable at rho = " + format_g(rho));
    }
    ControlState y0;
    y0.y.push_back(std::min(1.0, std::max(0.0, y0v)));
    const OdeSolution sol = integrate(cfg.model, y0, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      tab.rows[i].push_back(sol.gamma[i]);
      tab.rows[i].push_back(gamma_closed_form_A1(th, rho, grid[i], g0));
    }
    tab.columns.push_back("ode_" + format_g(g0));
    tab.columns.push_back("exact_" + format_g(g0));
  }
  nlohmann::json extra;
  extra["gamma0"] = gamma0;
  const std::string path =
      write_output(cfg, "figure2", tab, extra, elapsed_seconds(t0));
  res.files.push_back(path);
  res.summary["gamma_infinity"] = cfg.model.gamma_bar();
  return res;
}

RunResult run_verify(const ExperimentConfig& cfg) {
  RunResult res;
  AcceptanceOptions opts;
  opts.out_dir = cfg.out_dir;
  opts.master_seed = cfg.master_seed;
  const AcceptanceReport rep = run_acceptance(opts, std::cout);
  res.exit_code = rep.all_pass ? 0 : 2;
  res.summary["all_pass"] = rep.all_pass;
  res.summary["criteria"] = nlohmann::json::array();
  for (const auto& c : rep.results) {
    res.summary["criteria"].push_back(
        {{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return res;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind == "ip-sim") return run_ip_sim(cfg);
  if (cfg.kind == "ode") return run_ode(cfg);
  if (cfg.kind == "wf") return run_wf(cfg);
  if (cfg.kind == "pd-sample") return run_pd_sample(cfg);
  if (cfg.kind == "moments") return run_moments(cfg);
  if (cfg.kind == "figure2") return run_figure2(cfg);
  if (cfg.kind == "verify") return run_verify(cfg);
  throw ConfigError("config: unknown kind \"" + cfg.kind + "\"");
}

}  // namespace condensate
