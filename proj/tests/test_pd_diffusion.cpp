#include <doctest.h>

#include <cmath>
#include <vector>

#include "condensate/control_ode.hpp"
#include "condensate/pd_diffusion.hpp"

using namespace condensate;

namespace {

struct Welford {
  double mean = 0.0, m2 = 0.0;
  long long n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const {
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

double phi2_of(const std::vector<double>& z) {
  double s = 0.0, p2 = 0.0;
  for (double v : z) {
    s += v;
    p2 += v * v;
  }
  const double top = std::max(0.0, 1.0 - s);
  return p2 + top * top;
}

}  // namespace

TEST_CASE("stick counts cover the requested residual mass") {
  CHECK(default_stick_count(1.0) == 34);
  CHECK(default_stick_count(2.0) == 57);
  CHECK(default_stick_count(0.5, 1e-6) == 13);
  CHECK_THROWS_AS(default_stick_count(0.0), ConfigError);
  CHECK_THROWS_AS(default_stick_count(1.0, 2.0), ConfigError);
}

TEST_CASE("residual allocation recursion is exact on dyadic fractions") {
  const std::vector<double> v = stick_break_weights({0.5, 0.5, 0.5});
  CHECK(v == std::vector<double>{0.5, 0.25, 0.125});
  CHECK(stick_break_weights({}).empty());
}

TEST_CASE("stick breaking yields a normalized, sorted sample") {
  RngStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const PdSample s = stick_break(1.0, 34, rng);
    double total = s.residual;
    for (double v : s.v) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.residual >= 0.0);
    for (size_t j = 1; j < s.x.size(); ++j) CHECK(s.x[j - 1] >= s.x[j]);
  }
  CHECK_THROWS_AS(stick_break(1.0, 0, rng), ConfigError);
}

TEST_CASE("stick breaking reproduces the second moment") {
  RngStream rng(23);
  Welford acc;
  for (int i = 0; i < 20000; ++i) {
    const PdSample s = stick_break(1.0, 34, rng);
    double p2 = 0.0;
    for (double v : s.v) p2 += v * v;
    acc.add(p2);
  }
  // E[phi_2] = 1 / (1 + theta) = 1/2 at theta = 1
  CHECK(std::abs(acc.mean - 0.5) < 4.0 * acc.se() + 1e-9);
}

TEST_CASE("scaled sampling short circuits at scale zero") {
  RngStream a(77), b(77);
  const PdSample s = sample_pd_scaled(1.0, 0.0, 34, a);
  CHECK(s.v.empty());
  CHECK(s.x.empty());
  CHECK(s.residual == 0.0);
  // no randomness was consumed
  CHECK(a.uniform() == b.uniform());
  CHECK_THROWS_AS(sample_pd_scaled(1.0, -0.1, 34, a), ConfigError);
}

TEST_CASE("closed form moments of the scaled law") {
  CHECK(pd_moment(1, 3.0, 0.7) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(pd_moment(2, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pd_moment(3, 2.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(pd_moment(4, 2.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(pd_moment(2, 1.0, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(pd_moment(0, 1.0), ConfigError);
  CHECK_THROWS_AS(pd_moment(2, 0.0), ConfigError);
}

TEST_CASE("square root diffusion transition has the exact moments") {
  const double x0 = 0.7, a = 0.3, b = 1.2, dt = 0.05;
  const double ed = std::exp(-b * dt);
  const double mean = x0 * ed + (a / b) * (1.0 - ed);
  const double c = (1.0 - ed) / (2.0 * b);
  const double lam = x0 * ed / (2.0 * c);
  const double var = 4.0 * c * c * (a + 2.0 * lam);
  RngStream rng(314159);
  Welford acc;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc.add(cir_transition(x0, a, b, dt, rng));
  CHECK(std::abs(acc.mean - mean) < 4.0 * std::sqrt(var / n));
  const double var_hat = acc.m2 / static_cast<double>(n - 1);
  CHECK(var_hat == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("square root diffusion keeps the origin absorbing") {
  RngStream rng(8);
  for (int i = 0; i < 100; ++i)
    CHECK(cir_transition(0.0, 0.0, 1.0, 0.1, rng) == 0.0);
  // with no immigration, small mass dies in finite time and stays dead
  int zeros = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = cir_transition(0.01, 0.0, 1.0, 0.5, rng);
    CHECK(x >= 0.0);
    if (x == 0.0) ++zeros;
  }
  CHECK(zeros > 900);
  CHECK_THROWS_AS(cir_transition(0.5, 0.1, 1.0, 0.0, rng), ConfigError);
  CHECK_THROWS_AS(cir_transition(-0.5, 0.1, 1.0, 0.1, rng), ConfigError);
  CHECK_THROWS_AS(cir_transition(0.5, -0.1, 1.0, 0.1, rng), ConfigError);
}

TEST_CASE("two type diffusion without mutation loses diversity at rate two") {
  // E[z (1 - z)] decays like e^{-2 t}, so E[phi_2] = 1 - 0.5 e^{-2 t}
  const double t_end = 0.5, dt = 2e-3;
  const int steps = 250, paths = 4000;
  Welford acc;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(derive_seed(9001, static_cast<std::uint64_t>(p)));
    std::vector<double> z{0.5};
    for (int k = 0; k < steps; ++k) wf_step_classical(z, 0.0, dt, rng);
    acc.add(phi2_of(z));
  }
  const double target = 1.0 - 0.5 * std::exp(-2.0 * t_end);
  CHECK(std::abs(acc.mean - target) < 4.0 * acc.se());
}

TEST_CASE("mutation balances drift in the dust regime") {
  // Ten types, mutation rate one, started from a single atom. The second
  // moment then obeys E' = (2 + 2/9) - (4 + 2/9) E, whose value at t = 1/2
  // is frozen below. Most coordinates spend this window as dust piled
  // against zero, which is exactly where a clipped Euler scheme breaks.
  const double dt = 2e-3;
  const int steps = 250, paths = 3000;
  Welford acc;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(derive_seed(5150, static_cast<std::uint64_t>(p)));
    std::vector<double> z(9, 0.0);
    z[0] = 1.0;
    for (int k = 0; k < steps; ++k) wf_step_classical(z, 1.0, dt, rng);
    acc.add(phi2_of(z));
  }
  CHECK(std::abs(acc.mean - 0.5836805258700509) < 4.0 * acc.se());
}

TEST_CASE("a full step advances clusters and environment in lockstep") {
  const ModelParams p{RateSpec::inclusion(1, 1.0), 1.0};
  WfState state;
  state.z = {0.4, 0.2};
  state.y = empty_sites_state(1);
  CHECK(state.M() == 3);
  RngStream rng(99);
  const ControlState y_expect = rk4_single_step(p, state.y, 0.01);
  const WfStepInfo info = wf_step(state, p, 0.01, rng);
  CHECK_FALSE(info.degenerate);
  CHECK(state.t == 0.01);
  CHECK(state.y.y == y_expect.y);  // same deterministic substep, bitwise
  double s = 0.0;
  for (double v : state.z) {
    CHECK(v >= 0.0);
    s += v;
  }
  CHECK(s <= 1.0 + 1e-12);

  const EmbeddedState es = project_cluster_state(state, p);
  double mass = 0.0;
  for (double v : es.x) mass += v;
  CHECK(mass == doctest::Approx(gamma_of_y(p, state.y)).epsilon(1e-12));
  for (size_t j = 1; j < es.x.size(); ++j) CHECK(es.x[j - 1] >= es.x[j]);
}

TEST_CASE("moment runner is reproducible and respects a dead start") {
  const ModelParams p{RateSpec::inclusion(1, 1.0), 1.0};
  const ControlState y0 = empty_sites_state(1);
  const KingmanVector x0{1.0};
  const std::vector<double> grid{0.0, 0.1};
  const WfMomentSeries a = run_wf_moments(p, y0, x0, 5, 0.01, grid, 50, 42);
  const WfMomentSeries b = run_wf_moments(p, y0, x0, 5, 0.01, grid, 50, 42);
  CHECK(a.phi2_mean == b.phi2_mean);
  CHECK(a.phi3_se == b.phi3_se);
  CHECK(a.paths == 50);
  CHECK(a.gamma[0] == doctest::Approx(1.0));
  CHECK(a.phi2_mean[0] == doctest::Approx(1.0));  // single atom at gamma = 1

  // subcritical start with gamma = 0: everything is identically zero
  ControlState dead;
  dead.y = {0.0};
  const WfMomentSeries z =
      run_wf_moments({RateSpec::inclusion(1, 1.0), 0.5}, dead, {}, 5, 0.01, grid, 10, 1);
  for (double v : z.phi2_mean) CHECK(v == 0.0);
  for (double v : z.gamma) CHECK(v == 0.0);
  CHECK(z.guard_fraction == 0.0);

  CHECK_THROWS_AS(run_wf_moments(p, y0, x0, 1, 0.01, grid, 10, 1), ConfigError);
  CHECK_THROWS_AS(run_wf_moments(p, y0, x0, 5, 0.0, grid, 10, 1), ConfigError);
  CHECK_THROWS_AS(run_wf_moments(p, y0, x0, 5, 0.01, grid, 1, 1), ConfigError);
  CHECK_THROWS_AS(run_wf_moments(p, y0, {0.5, 0.3, 0.2, 0.1}, 4, 0.01, grid, 10, 1),
                  ConfigError);
}
