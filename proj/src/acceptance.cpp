#include "condensate/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "condensate/configuration.hpp"
#include "condensate/control_ode.hpp"
#include "condensate/errors.hpp"
#include "condensate/harness.hpp"
#include "condensate/ip_sim.hpp"
#include "condensate/model.hpp"
#include "condensate/moment_oracle.hpp"
#include "condensate/pd_diffusion.hpp"
#include "condensate/rng.hpp"

namespace condensate {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ModelParams leading_example(double rho) {
  return ModelParams{RateSpec::inclusion(1, 1.0), rho};
}

// base config used when a check writes an artifact, so the sidecar echoes
// the parameters that actually ran
ExperimentConfig artifact_config(const AcceptanceOptions& opts,
                                 const std::string& subdir) {
  ExperimentConfig cfg;
  cfg.master_seed = opts.master_seed;
  cfg.out_dir = opts.out_dir + "/" + subdir;
  return cfg;
}

// flow started from the all-empty profile, gamma(0) = 1
CriterionResult crit_closed_form_flow(const AcceptanceOptions&) {
  CriterionResult res{1, "closed-form-flow", false, "", 0.0};
  const double tol = 1e-8;
  const std::vector<double> grid = uniform_grid(3.0, 61);
  double worst = 0.0;
  for (double rho : {0.025, 0.25, 0.65, 1.0}) {
    const ModelParams p = leading_example(rho);
    const OdeSolution sol =
        integrate_fixed(p, empty_sites_state(1), grid, 1e-3);
    for (size_t i = 0; i < grid.size(); ++i) {
      worst = std::max(
          worst, std::abs(sol.gamma[i] - gamma_closed_form_A1(1.0, rho, grid[i])));
    }
  }
  res.pass = worst < tol;
  res.detail = "sup |ode - closed form| = " + fmt(worst) + " over rho in "
               "{0.025, 0.25, 0.65, 1}, tol " + fmt(tol);
  return res;
}

CriterionResult crit_critical_density(const AcceptanceOptions&) {
  CriterionResult res{2, "critical-density", false, "", 0.0};
  double worst_rc = 0.0, worst_norm = 0.0;
  for (int A : {1, 2, 3, 5}) {
    for (double theta : {1.0, 0.7}) {
      const RateSpec spec = RateSpec::inclusion(A, theta);
      const std::vector<double> ybar = fixed_point_ybar(spec);
      double sum = 0.0;
      for (double v : ybar) sum += v;
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
      // constant rate ratios make the frozen profile uniform, so the
      // critical density is the mean of 0..A
      worst_rc = std::max(worst_rc,
                          std::abs(rho_crit(spec) - 0.5 * static_cast<double>(A)));
    }
  }
  res.pass = worst_rc < 1e-14 && worst_norm < 1e-14;
  res.detail = "max |rho_c - A/2| = " + fmt(worst_rc) +
               ", max |sum ybar - 1| = " + fmt(worst_norm) + ", tol 1e-14";
  return res;
}

CriterionResult crit_mutation_rate_identity(const AcceptanceOptions& opts) {
  CriterionResult res{3, "mutation-rate-identity", false, "", 0.0};
  RngStream rng(derive_seed(opts.master_seed, 301));
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const int A = 1 + (s % 5);
    const RateSpec spec = random_two_phase_spec(A, rng);
    // density above A keeps gamma bounded away from zero for every state
    const double rho = static_cast<double>(A) + 1.0 + rng.uniform();
    const ModelParams p{spec, rho};
    for (int i = 0; i < 1000; ++i) {
      const ControlState y = random_control_state(A, rng);
      const double err = std::abs(beta_of_y(p, y) - beta_bar(spec, y));
      worst = std::max(worst, err);
    }
  }
  res.pass = worst < 1e-12;
  res.detail = "max |beta(y) - r_A y_A| = " + fmt(worst) +
               " over 20 rate tables x 1000 states, tol 1e-12";
  return res;
}

CriterionResult crit_long_time_mass(const AcceptanceOptions&) {
  CriterionResult res{4, "long-time-mass", false, "", 0.0};
  struct Case {
    int A;
    double rho;
    double expect;
  };
  const std::vector<Case> cases = {
      {1, 2.0, 0.75}, {2, 3.0, 2.0 / 3.0}, {1, 0.25, 0.0}};
  double worst = 0.0;
  std::ostringstream detail;
  for (const Case& c : cases) {
    const ModelParams p{RateSpec::inclusion(c.A, 1.0), c.rho};
    const LongTimeResult r = long_time_gamma(p, empty_sites_state(c.A));
    const double err = std::abs(r.gamma_limit - c.expect);
    worst = std::max(worst, err);
    detail << "(A=" << c.A << ", rho=" << fmt(c.rho) << "): " << fmt(r.gamma_limit)
           << " vs " << fmt(c.expect) << "; ";
  }
  res.pass = worst < 1e-6;
  res.detail = detail.str() + "max err " + fmt(worst) + ", tol 1e-06";
  return res;
}

CriterionResult crit_prelimit_tracks_flow(const AcceptanceOptions& opts) {
  CriterionResult res{5, "prelimit-tracks-flow", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = leading_example(1.0);
  ObservableSpec what;
  what.gamma = true;
  what.slow_profile = true;
  what.fast_fraction = false;
  // a single macroscopic pile matches the gamma(0) = 1 start of the flow;
  // every site filled would pin both curves to the frozen state instead
  const ReplicaSeries rs =
      run_ip_replicas(p, 1000, InitialCondition::single_pile(), 3.0, 30, 20,
                      opts.master_seed, 500, what);
  const SeriesWithSE g = aggregate_column(rs, 0);   // gamma_N
  const SeriesWithSE y0 = aggregate_column(rs, 1);  // y_0
  const OdeSolution sol = integrate_fixed(p, empty_sites_state(1), rs.times, 1e-3);
  double sup_g = 0.0, sup_y = 0.0;
  for (size_t i = 0; i < rs.times.size(); ++i) {
    sup_g = std::max(sup_g, std::abs(g.mean[i] - gamma_closed_form_A1(
                                                     1.0, 1.0, rs.times[i])));
    sup_y = std::max(sup_y, std::abs(y0.mean[i] - sol.states[i].y[0]));
  }
  res.pass = sup_g < 0.05 && sup_y < 0.05;
  res.detail = "L=1000, 20 replicas: sup |gamma_N - closed form| = " +
               fmt(sup_g) + ", sup |empty fraction - flow| = " + fmt(sup_y) +
               ", tol 0.05";

  ExperimentConfig cfg = artifact_config(opts, "prelimit");
  cfg.kind = "ip-sim";
  cfg.sizes = {1000};
  cfg.horizon = 3.0;
  cfg.grid_points = 30;
  cfg.replicas = 20;
  cfg.replica_offset = 500;
  Table tab;
  tab.columns = {"t",    "gamma_N_mean", "gamma_N_se", "y_0_mean",
                 "y_0_se", "gamma_closed", "y_0_flow"};
  for (size_t i = 0; i < rs.times.size(); ++i) {
    tab.rows.push_back({rs.times[i], g.mean[i], g.se[i], y0.mean[i], y0.se[i],
                        gamma_closed_form_A1(1.0, 1.0, rs.times[i]),
                        sol.states[i].y[0]});
  }
  nlohmann::json extra;
  extra["events_per_replica"] = rs.events_per_replica;
  extra["sup_gamma"] = sup_g;
  extra["sup_y0"] = sup_y;
  write_output(cfg, "prelimit_gamma", tab, extra,
               std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count());
  return res;
}

CriterionResult crit_vanishing_fast_phase(const AcceptanceOptions& opts) {
  CriterionResult res{6, "vanishing-fast-phase", false, "", 0.0};
  const ModelParams p = leading_example(1.0);
  const int replicas = 200;
  const std::vector<int> ls = {250, 500, 1000, 2000};
  std::vector<double> means;
  std::ostringstream detail;
  for (size_t li = 0; li < ls.size(); ++li) {
    const int L = ls[li];
    double sum = 0.0;
    for (int r = 0; r < replicas; ++r) {
      SimState sim(p.spec, L, L, InitialCondition::all_ones(),
                   derive_seed(opts.master_seed,
                               6000 + 1000 * static_cast<std::uint64_t>(li) +
                                   static_cast<std::uint64_t>(r)));
      sum += integrated_fast_fraction(sim, 1.0);
    }
    means.push_back(sum / replicas);
    detail << "L=" << L << ": " << fmt(means.back()) << "; ";
  }
  bool decreasing = true;
  for (size_t i = 1; i < means.size(); ++i) {
    if (!(means[i] < means[i - 1])) decreasing = false;
  }
  const bool halved = means.back() < 0.5 * means.front();
  res.pass = decreasing && halved;
  res.detail = "time-averaged fast fraction, 200 replicas: " + detail.str() +
               (decreasing ? "strictly decreasing" : "NOT decreasing") +
               (halved ? ", last < half of first" : ", last >= half of first");
  return res;
}

CriterionResult crit_stationary_arbitration(const AcceptanceOptions& opts) {
  CriterionResult res{7, "stationary-arbitration", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = leading_example(1.0);
  ObservableSpec what;
  what.gamma = false;
  what.slow_profile = false;
  what.fast_fraction = false;
  what.phi_max = 2;
  const ReplicaSeries rs =
      run_ip_replicas(p, 1000, InitialCondition::slow_equilibrium(), 10.0, 2,
                      50, opts.master_seed, 700, what);
  const SeriesWithSE agg = aggregate_column(rs, 0);  // phi_2
  const double mean = agg.mean.back();
  const double se = agg.se.back();

  const std::vector<double> ybar = fixed_point_ybar(p.spec);
  ControlState ystat;
  ystat.y.assign(ybar.begin(), ybar.end() - 1);
  const double gbar = p.gamma_bar();
  // two candidate stationary moments: the escape rate evaluated on the
  // frozen profile, and the bare per-site rate constant
  const double theta_profile = theta_of_y(p, ystat);
  const double theta_bare = p.spec.q_at(1);
  const double cand_profile = gbar * gbar / (1.0 + theta_profile);
  const double cand_bare = gbar * gbar / (1.0 + theta_bare);
  const double z_profile = se > 0.0 ? std::abs(mean - cand_profile) / se
                                    : std::numeric_limits<double>::infinity();
  const double z_bare = se > 0.0 ? std::abs(mean - cand_bare) / se
                                 : std::numeric_limits<double>::infinity();
  res.pass = std::min(z_profile, z_bare) <= 3.0;
  std::ostringstream detail;
  detail << "phi_2(t=10) = " << fmt(mean) << " +- " << fmt(se)
         << "; profile rate " << fmt(theta_profile) << " -> " << fmt(cand_profile)
         << " (z=" << fmt(z_profile) << "), bare rate " << fmt(theta_bare)
         << " -> " << fmt(cand_bare) << " (z=" << fmt(z_bare) << "); "
         << (z_profile <= 3.0 && z_bare <= 3.0
                 ? "both within 3 SE"
                 : (z_profile <= 3.0
                        ? "profile candidate within 3 SE"
                        : (z_bare <= 3.0 ? "bare candidate within 3 SE"
                                         : "NEITHER within 3 SE")));
  res.detail = detail.str();

  ExperimentConfig cfg = artifact_config(opts, "stationary");
  cfg.kind = "ip-sim";
  cfg.sizes = {1000};
  cfg.horizon = 10.0;
  cfg.grid_points = 2;
  cfg.replicas = 50;
  cfg.replica_offset = 700;
  cfg.initial = "slow-equilibrium";
  Table tab;
  tab.columns = {"candidate", "value", "z"};
  tab.rows.push_back({0.0, cand_profile, z_profile});
  tab.rows.push_back({1.0, cand_bare, z_bare});
  tab.rows.push_back({2.0, mean, 0.0});
  nlohmann::json extra;
  extra["phi2_mean"] = mean;
  extra["phi2_se"] = se;
  extra["events_per_replica"] = rs.events_per_replica;
  write_output(cfg, "stationary_phi2", tab, extra,
               std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count());
  return res;
}

CriterionResult crit_diffusion_vs_hierarchy(const AcceptanceOptions& opts) {
  CriterionResult res{8, "diffusion-vs-hierarchy", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = leading_example(1.0);
  const ControlState y0 = empty_sites_state(1);
  const KingmanVector x0 = {1.0};
  const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0};
  const WfMomentSeries ms =
      run_wf_moments(p, y0, x0, 50, 1e-3, grid, 5000,
                     derive_seed(opts.master_seed, 800));
  const MomentSystem sys = build_moment_system(
      {MonomialIndex::of({2}), MonomialIndex::of({3})}, 6);
  const MomentTrack track = solve_hierarchy(sys, p, y0, x0, grid, 1e-3);
  const int i2 = sys.index_of(MonomialIndex::of({2}));
  const int i3 = sys.index_of(MonomialIndex::of({3}));
  double max_z = 0.0;
  std::ostringstream detail;
  for (size_t g = 1; g < grid.size(); ++g) {
    const double ref2 = track.values[g][static_cast<size_t>(i2)];
    const double ref3 = track.values[g][static_cast<size_t>(i3)];
    const double z2 = std::abs(ms.phi2_mean[g] - ref2) / ms.phi2_se[g];
    const double z3 = std::abs(ms.phi3_mean[g] - ref3) / ms.phi3_se[g];
    max_z = std::max({max_z, z2, z3});
    detail << "t=" << fmt(grid[g]) << ": z2=" << fmt(z2) << " z3=" << fmt(z3)
           << "; ";
  }
  res.pass = max_z <= 3.0;
  res.detail = "M=50, dt=1e-3, 5000 paths vs hierarchy: " + detail.str() +
               "max |z| = " + fmt(max_z) + ", tol 3";

  ExperimentConfig cfg = artifact_config(opts, "diffusion");
  cfg.kind = "wf";
  cfg.horizon = 2.0;
  cfg.grid_points = static_cast<int>(grid.size());
  cfg.wf_sites = 50;
  cfg.wf_dt = 1e-3;
  cfg.wf_paths = 5000;
  Table tab;
  tab.columns = {"t",         "phi2_mc",  "phi2_se", "phi2_oracle",
                 "phi3_mc",   "phi3_se",  "phi3_oracle", "gamma", "theta"};
  for (size_t g = 0; g < grid.size(); ++g) {
    tab.rows.push_back({grid[g], ms.phi2_mean[g], ms.phi2_se[g],
                        track.values[g][static_cast<size_t>(i2)],
                        ms.phi3_mean[g], ms.phi3_se[g],
                        track.values[g][static_cast<size_t>(i3)], ms.gamma[g],
                        ms.theta[g]});
  }
  nlohmann::json extra;
  extra["max_z"] = max_z;
  extra["guard_fraction"] = ms.guard_fraction;
  write_output(cfg, "diffusion_moments", tab, extra,
               std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count());
  return res;
}

CriterionResult crit_stick_breaking_sampler(const AcceptanceOptions& opts) {
  CriterionResult res{9, "stick-breaking-sampler", false, "", 0.0};
  const std::vector<double> det =
      stick_break_weights({0.5, 0.5, 0.5});
  const bool det_ok =
      det.size() == 3 && det[0] == 0.5 && det[1] == 0.25 && det[2] == 0.125;
  double worst_z = 0.0;
  RngStream rng(derive_seed(opts.master_seed, 900));
  for (double theta : {0.5, 1.0, 2.0}) {
    const int sticks = default_stick_count(theta);
    const int n = 100000;
    double mean[3] = {0.0, 0.0, 0.0};
    double m2[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const PdSample s = stick_break(theta, sticks, rng);
      for (int m = 2; m <= 4; ++m) {
        const double v = phi_m(s.x, m);
        const double d = v - mean[m - 2];
        mean[m - 2] += d / static_cast<double>(i + 1);
        m2[m - 2] += d * (v - mean[m - 2]);
      }
    }
    for (int m = 2; m <= 4; ++m) {
      const double se =
          std::sqrt(m2[m - 2] / (static_cast<double>(n - 1) * n));
      const double z = std::abs(mean[m - 2] - pd_moment(m, theta)) / se;
      worst_z = std::max(worst_z, z);
    }
  }
  res.pass = det_ok && worst_z <= 3.0;
  res.detail = std::string("deterministic recursion ") +
               (det_ok ? "exact" : "WRONG") +
               "; max |z| over theta in {0.5, 1, 2}, m in {2, 3, 4}: " +
               fmt(worst_z) + ", tol 3 (10^5 samples each)";
  return res;
}

CriterionResult crit_coupling_rate_bounds(const AcceptanceOptions& opts) {
  CriterionResult res{10, "coupling-rate-bounds", false, "", 0.0};
  const ModelParams p = leading_example(1.0);
  const int L = 1000;
  const long long N = 1000;
  const double delta = p.spec.zeta(L);
  RngStream rng(derive_seed(opts.master_seed, 1000));
  int violations = 0, configs = 0, skipped = 0;
  double worst_p_slack = std::numeric_limits<double>::infinity();
  while (configs < 1000 && skipped < 10000) {
    const std::vector<long long> occ = build_occupations(
        InitialCondition::uniform_random(), p.spec, L, N, rng);
    Configuration config(p.spec, occ);
    int fast_site = -1, slow_site = -1;
    for (int i = 0; i < L; ++i) {
      if (fast_site < 0 && occ[static_cast<size_t>(i)] > p.spec.A) fast_site = i;
      if (slow_site < 0 && occ[static_cast<size_t>(i)] <= p.spec.A) slow_site = i;
      if (fast_site >= 0 && slow_site >= 0) break;
    }
    if (config.gamma_N() <= 0.1 || fast_site < 0 || slow_site < 0) {
      ++skipped;
      continue;
    }
    ++configs;
    const CouplingReport rf =
        check_coupling_bounds(config, delta, fast_site, false);
    if (!rf.pass) ++violations;
    worst_p_slack = std::min(worst_p_slack, rf.p_bound - rf.p);
    const CouplingReport rsl =
        check_coupling_bounds(config, delta, slow_site, false);
    if (!rsl.pass) ++violations;
  }
  res.pass = configs == 1000 && violations == 0;
  res.detail = std::to_string(violations) + " violations over " +
               std::to_string(configs) +
               " random configurations (both branches); min p-bound slack " +
               fmt(worst_p_slack);
  return res;
}

CriterionResult crit_two_site_kernel(const AcceptanceOptions& opts) {
  CriterionResult res{11, "two-site-kernel", false, "", 0.0};
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  SimState sim(spec, 2, 3,
               InitialCondition::from_histogram({{0, 1}, {3, 1}}),
               derive_seed(opts.master_seed, 1100));
  double hold[4] = {0.0, 0.0, 0.0, 0.0};
  double down[4] = {0.0, 0.0, 0.0, 0.0};  // site 0 loses a particle
  double up[4] = {0.0, 0.0, 0.0, 0.0};    // site 0 gains one
  for (int e = 0; e < 1000000; ++e) {
    const int n0 = static_cast<int>(sim.config().occupation(0));
    const EventRecord ev = sim.step();
    hold[n0] += ev.dt;
    if (ev.moved) {
      if (ev.source == 0) {
        down[n0] += 1.0;
      } else {
        up[n0] += 1.0;
      }
    }
  }
  double max_z = 0.0;
  bool dead_ok = true;
  std::ostringstream detail;
  for (int s = 0; s <= 3; ++s) {
    const double rate_down = u1(spec, 2, s) * u2(spec, 2, 3 - s);
    const double rate_up = u1(spec, 2, 3 - s) * u2(spec, 2, s);
    const struct {
      double rate, count;
      const char* tag;
    } dirs[2] = {{rate_down, down[s], "down"}, {rate_up, up[s], "up"}};
    for (const auto& d : dirs) {
      if (d.rate == 0.0) {
        if (d.count != 0.0) dead_ok = false;
        continue;
      }
      if (hold[s] <= 0.0 || d.count == 0.0) {
        dead_ok = false;  // a reachable transition never fired
        continue;
      }
      const double emp = d.count / hold[s];
      const double se = std::sqrt(d.count) / hold[s];
      const double z = std::abs(emp - d.rate) / se;
      max_z = std::max(max_z, z);
      detail << s << d.tag << " z=" << fmt(z) << "; ";
    }
  }
  res.pass = dead_ok && max_z <= 3.0;
  res.detail = "L=2, N=3, 10^6 events: " + detail.str() + "max |z| = " +
               fmt(max_z) + ", tol 3" + (dead_ok ? "" : "; RATE TABLE MISMATCH");
  return res;
}

CriterionResult crit_reproducible_outputs(const AcceptanceOptions& opts) {
  CriterionResult res{12, "reproducible-outputs", false, "", 0.0};
  std::vector<ExperimentConfig> cfgs;
  {
    ExperimentConfig c;
    c.kind = "ip-sim";
    c.sizes = {200};
    c.replicas = 2;
    c.horizon = 0.5;
    c.grid_points = 11;
    c.phi_max = 3;
    c.top_clusters = 2;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = "ode";
    c.model = ModelParams{RateSpec::inclusion(2, 0.8), 2.5};
    c.horizon = 2.0;
    c.grid_points = 21;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = "wf";
    c.wf_sites = 10;
    c.wf_dt = 1e-2;
    c.wf_paths = 200;
    c.horizon = 0.5;
    c.grid_points = 6;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = "pd-sample";
    c.pd_samples = 20000;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = "moments";
    c.moment_targets = {{2}, {3}, {2, 2}};
    c.horizon = 1.0;
    c.grid_points = 11;
    cfgs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = "figure2";
    c.horizon = 3.0;
    c.grid_points = 31;
    cfgs.push_back(c);
  }
  int mismatches = 0, files = 0;
  std::ostringstream detail;
  for (ExperimentConfig& c : cfgs) {
    c.master_seed = opts.master_seed;
    c.out_dir = opts.out_dir + "/repro/a";
    const RunResult ra = run_experiment(c);
    c.out_dir = opts.out_dir + "/repro/b";
    const RunResult rb = run_experiment(c);
    if (ra.files.size() != rb.files.size()) {
      ++mismatches;
      detail << c.kind << ": file count differs; ";
      continue;
    }
    for (size_t i = 0; i < ra.files.size(); ++i) {
      ++files;
      if (slurp(ra.files[i]) != slurp(rb.files[i])) {
        ++mismatches;
        detail << ra.files[i] << " != " << rb.files[i] << "; ";
      }
    }
  }
  res.pass = mismatches == 0;
  res.detail = "every emitter run twice from one seed: " +
               std::to_string(files) + " data files compared, " +
               std::to_string(mismatches) + " byte mismatches" +
               (mismatches ? " (" + detail.str() + ")" : "");
  return res;
}

}  // namespace

AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                std::ostream& log) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  const std::vector<Fn> checks = {
      crit_closed_form_flow,      crit_critical_density,
      crit_mutation_rate_identity, crit_long_time_mass,
      crit_prelimit_tracks_flow,  crit_vanishing_fast_phase,
      crit_stationary_arbitration, crit_diffusion_vs_hierarchy,
      crit_stick_breaking_sampler, crit_coupling_rate_bounds,
      crit_two_site_kernel,       crit_reproducible_outputs};
  std::filesystem::create_directories(options.out_dir);
  AcceptanceReport report;
  report.all_pass = true;
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = checks[i](options);
    } catch (const std::exception& e) {
      r.id = static_cast<int>(i) + 1;
      r.name = "criterion-" + std::to_string(i + 1);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    char line[512];
    std::snprintf(line, sizeof(line), "[%2d/12] %s  %-26s %s (%.2f s)", r.id,
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                  r.seconds);
    log << line << "\n" << std::flush;
    report.all_pass = report.all_pass && r.pass;
    report.results.push_back(std::move(r));
  }
  log << (report.all_pass ? "ALL CHECKS PASSED" : "SOME CHECKS FAILED")
      << "\n";

  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  j["master_seed"] = options.master_seed;
  j["criteria"] = nlohmann::json::array();
  for (const auto& r : report.results) {
    j["criteria"].push_back({{"id", r.id},
                             {"name", r.name},
                             {"pass", r.pass},
                             {"detail", r.detail},
                             {"seconds", r.seconds}});
  }
  std::ofstream f(options.out_dir + "/acceptance.json");
  if (f) f << j.dump(2) << "\n";
  return report;
}

}  // namespace condensate
