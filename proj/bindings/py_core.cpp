// Python bindings for the simulation core. Thin wrappers only: plain
// lists in, dicts of plain lists out, so the Python side needs nothing
// beyond the interpreter.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "condensate/acceptance.hpp"
#include "condensate/configuration.hpp"
#include "condensate/control_ode.hpp"
#include "condensate/errors.hpp"
#include "condensate/harness.hpp"
#include "condensate/ip_sim.hpp"
#include "condensate/model.hpp"
#include "condensate/moment_oracle.hpp"
#include "condensate/pd_diffusion.hpp"
#include "condensate/rng.hpp"

namespace py = pybind11;
using namespace condensate;

namespace {

ControlState as_state(std::vector<double> y) {
  ControlState s;
  s.y = std::move(y);
  return s;
}

py::dict solution_dict(const OdeSolution& sol) {
  py::dict d;
  d["times"] = sol.times;
  std::vector<std::vector<double>> states;
  states.reserve(sol.states.size());
  for (const auto& s : sol.states) states.push_back(s.y);
  d["states"] = states;
  d["gamma"] = sol.gamma;
  d["theta"] = sol.theta;
  d["step"] = sol.h;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "mean-field condensation dynamics: particle simulation, the limiting "
      "slow-profile flow, cluster diffusion, and moment oracles";

  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<RateSpec>(m, "RateSpec")
      .def_static("inclusion", &RateSpec::inclusion, py::arg("A"),
                  py::arg("theta"))
      .def_static("two_phase", &RateSpec::two_phase, py::arg("A"),
                  py::arg("q"), py::arg("r"), py::arg("zeta_scale") = 0.0)
      .def_readonly("A", &RateSpec::A)
      .def_property_readonly("kind",
                             [](const RateSpec& s) {
                               return s.kind == RateKind::Inclusion
                                          ? "inclusion"
                                          : "two-phase";
                             })
      .def("q_at", &RateSpec::q_at, py::arg("k"))
      .def("r_at", &RateSpec::r_at, py::arg("k"))
      .def("zeta", &RateSpec::zeta, py::arg("L"))
      .def("to_json", [](const RateSpec& s) { return rate_spec_to_string(s); })
      .def_static("from_json",
                  [](const std::string& t) { return rate_spec_from_string(t); })
      .def("__eq__",
           [](const RateSpec& a, const RateSpec& b) { return a == b; })
      .def("__repr__", [](const RateSpec& s) {
        return "RateSpec(A=" + std::to_string(s.A) + ", kind=" +
               (s.kind == RateKind::Inclusion ? "inclusion" : "two-phase") +
               ")";
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](const RateSpec& spec, double rho) {
             ModelParams p{spec, rho};
             p.validate();
             return p;
           }),
           py::arg("spec"), py::arg("rho"))
      .def_readonly("spec", &ModelParams::spec)
      .def_readonly("rho", &ModelParams::rho)
      .def("rho_c", &ModelParams::rho_c)
      .def("gamma_bar", &ModelParams::gamma_bar)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(A=" + std::to_string(p.spec.A) +
               ", rho=" + std::to_string(p.rho) + ")";
      });

  m.def("u1", &u1, py::arg("spec"), py::arg("L"), py::arg("n"),
        "departure weight of a site holding n particles");
  m.def("u2", &u2, py::arg("spec"), py::arg("L"), py::arg("n"),
        "attraction weight of a site holding n particles");

  m.def(
      "gamma_of_y",
      [](const ModelParams& p, std::vector<double> y) {
        return gamma_of_y(p, as_state(std::move(y)));
      },
      py::arg("params"), py::arg("y"), "condensate fraction of a slow profile");
  m.def(
      "theta_of_y",
      [](const ModelParams& p, std::vector<double> y) {
        return theta_of_y(p, as_state(std::move(y)));
      },
      py::arg("params"), py::arg("y"), "net escape rate of a slow profile");
  m.def(
      "beta_of_y",
      [](const ModelParams& p, std::vector<double> y) {
        return beta_of_y(p, as_state(std::move(y)));
      },
      py::arg("params"), py::arg("y"),
      "mutation rate seen by the cluster coordinates");
  m.def(
      "beta_bar",
      [](const RateSpec& spec, std::vector<double> y) {
        return beta_bar(spec, as_state(std::move(y)));
      },
      py::arg("spec"), py::arg("y"),
      "closed form r_A y_A of the mutation rate");
  m.def(
      "drift_b",
      [](const ModelParams& p, std::vector<double> y) {
        return drift_b(p, as_state(std::move(y)));
      },
      py::arg("params"), py::arg("y"), "slow profile drift");
  m.def("fixed_point_ybar", &fixed_point_ybar, py::arg("spec"),
        "normalized frozen profile, entries 0..A");
  m.def("rho_crit", &rho_crit, py::arg("spec"), "critical density");
  m.def("gamma_closed_form_A1", &gamma_closed_form_A1, py::arg("theta"),
        py::arg("rho"), py::arg("t"), py::arg("gamma0") = 1.0,
        "closed-form condensate fraction for A = 1");
  m.def("phi_m", &phi_m, py::arg("x"), py::arg("m"),
        "sum of m-th powers of cluster fractions");

  m.def(
      "integrate_flow",
      [](const ModelParams& p, std::vector<double> y0,
         std::vector<double> grid) {
        return solution_dict(integrate(p, as_state(std::move(y0)), grid));
      },
      py::arg("params"), py::arg("y0"), py::arg("grid"),
      "step-halving integration of the slow-profile flow");
  m.def(
      "long_time_gamma",
      [](const ModelParams& p, std::vector<double> y0, double horizon,
         double tol) {
        const LongTimeResult r =
            long_time_gamma(p, as_state(std::move(y0)), horizon, tol);
        py::dict d;
        d["gamma_limit"] = r.gamma_limit;
        d["converged"] = r.converged;
        d["t_reached"] = r.t_reached;
        d["drift_norm"] = r.drift_norm;
        d["y_end"] = r.y_end.y;
        return d;
      },
      py::arg("params"), py::arg("y0"), py::arg("horizon") = 1e4,
      py::arg("tol") = 1e-12, "follow the flow to its fixed point");

  m.def("default_stick_count", &default_stick_count, py::arg("theta"),
        py::arg("eps") = 1e-10);
  m.def("stick_break_weights", &stick_break_weights, py::arg("unit_fracs"),
        "deterministic residual allocation recursion");
  m.def("pd_moment", &pd_moment, py::arg("m"), py::arg("theta"),
        py::arg("scale") = 1.0);
  m.def(
      "sample_pd",
      [](double theta, double scale, int n, std::uint64_t seed, int sticks) {
        if (sticks <= 0) sticks = default_stick_count(theta);
        RngStream rng(seed);
        std::vector<std::vector<double>> out;
        out.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          out.push_back(sample_pd_scaled(theta, scale, sticks, rng).x);
        }
        return out;
      },
      py::arg("theta"), py::arg("scale") = 1.0, py::arg("n") = 1,
      py::arg("seed") = 1, py::arg("sticks") = 0,
      "stick-breaking samples, each sorted descending");

  m.def(
      "run_wf_moments",
      [](const ModelParams& p, std::vector<double> y0, std::vector<double> x0,
         int M, double dt, std::vector<double> grid, int paths,
         std::uint64_t seed) {
        const WfMomentSeries s = run_wf_moments(p, as_state(std::move(y0)), x0,
                                                M, dt, grid, paths, seed);
        py::dict d;
        d["times"] = s.times;
        d["phi2_mean"] = s.phi2_mean;
        d["phi2_se"] = s.phi2_se;
        d["phi3_mean"] = s.phi3_mean;
        d["phi3_se"] = s.phi3_se;
        d["gamma"] = s.gamma;
        d["theta"] = s.theta;
        d["guard_fraction"] = s.guard_fraction;
        d["paths"] = s.paths;
        return d;
      },
      py::arg("params"), py::arg("y0"), py::arg("x0"), py::arg("M"),
      py::arg("dt"), py::arg("grid"), py::arg("paths"), py::arg("seed"),
      "Monte Carlo moments of the cluster diffusion");

  m.def(
      "solve_hierarchy",
      [](const ModelParams& p, std::vector<double> y0, std::vector<double> x0,
         std::vector<std::vector<int>> targets, std::vector<double> grid,
         int degree_cap) {
        std::vector<MonomialIndex> idx;
        idx.reserve(targets.size());
        for (auto& t : targets) idx.push_back(MonomialIndex::of(t));
        const MomentSystem sys = build_moment_system(idx, degree_cap);
        const MomentTrack track =
            solve_hierarchy(sys, p, as_state(std::move(y0)), x0, grid);
        py::dict d;
        std::vector<std::string> labels;
        labels.reserve(track.indices.size());
        for (const auto& i : track.indices) labels.push_back(i.label());
        d["labels"] = labels;
        d["times"] = track.times;
        d["values"] = track.values;
        d["gamma"] = track.gamma;
        d["theta"] = track.theta;
        return d;
      },
      py::arg("params"), py::arg("y0"), py::arg("x0"), py::arg("targets"),
      py::arg("grid"), py::arg("degree_cap") = 6,
      "integrate the closed moment hierarchy");

  m.def(
      "simulate_ip",
      [](const ModelParams& p, long long L, const std::string& initial,
         double horizon, int grid_points, int replicas, std::uint64_t seed,
         int phi_max, int top_clusters) {
        ObservableSpec what;
        what.phi_max = phi_max;
        what.top_clusters = top_clusters;
        const ReplicaSeries rs =
            run_ip_replicas(p, L, InitialCondition::parse(initial), horizon,
                            grid_points, replicas, seed, 0, what);
        py::dict d;
        d["times"] = rs.times;
        d["columns"] = rs.columns;
        std::vector<std::vector<double>> mean, se;
        for (size_t c = 0; c < rs.columns.size(); ++c) {
          const SeriesWithSE a = aggregate_column(rs, c);
          mean.push_back(a.mean);
          se.push_back(a.se);
        }
        d["mean"] = mean;
        d["se"] = se;
        d["events_per_replica"] = rs.events_per_replica;
        return d;
      },
      py::arg("params"), py::arg("L"), py::arg("initial") = "single-pile",
      py::arg("horizon") = 1.0, py::arg("grid_points") = 11,
      py::arg("replicas") = 1, py::arg("seed") = 20260819,
      py::arg("phi_max") = 0, py::arg("top_clusters") = 0,
      "run the particle system and average observables over replicas");

  m.def(
      "run_config",
      [](const std::string& json_text) {
        const ExperimentConfig cfg =
            ExperimentConfig::from_json(nlohmann::json::parse(json_text));
        const RunResult r = run_experiment(cfg);
        py::dict d;
        d["files"] = r.files;
        d["summary"] = r.summary.dump();
        d["exit_code"] = r.exit_code;
        return d;
      },
      py::arg("config_json"),
      "run one experiment described by a config document");

  m.def(
      "canonical_config",
      [](const std::string& json_text) {
        return ExperimentConfig::from_json(nlohmann::json::parse(json_text))
            .canonical_text();
      },
      py::arg("config_json"), "normalized form of a config document");

  m.attr("__version__") = "1.0.0";
}
