#include <doctest.h>

#include <cmath>
#include <vector>

#include "condensate/control_ode.hpp"

using namespace condensate;

namespace {

const ModelParams kLeading{RateSpec::inclusion(1, 1.0), 1.0};

double endpoint_gamma(const ModelParams& p, double t, double h) {
  const OdeSolution sol = integrate_fixed(p, empty_sites_state(p.spec.A), {0.0, t}, h);
  return sol.gamma.back();
}

}  // namespace

TEST_CASE("empty sites state puts all mass at level zero") {
  const ControlState y = empty_sites_state(3);
  REQUIRE(y.A() == 3);
  CHECK(y.y[0] == 1.0);
  CHECK(y.y[1] == 0.0);
  CHECK(y.y_top() == 0.0);
  CHECK(empty_sites_state(0).A() == 0);
}

TEST_CASE("fixed step integration converges to the closed form") {
  const double exact = gamma_closed_form_A1(1.0, 1.0, 1.0);
  const double coarse = std::abs(endpoint_gamma(kLeading, 1.0, 0.1) - exact);
  const double fine = std::abs(endpoint_gamma(kLeading, 1.0, 0.01) - exact);
  CHECK(fine < coarse);
  CHECK(std::abs(endpoint_gamma(kLeading, 1.0, 1e-3) - exact) < 1e-10);
  // fourth order: ten times smaller steps buy roughly 1e4 accuracy
  CHECK(fine < coarse * 1e-2);
}

TEST_CASE("adaptive integration settles on the same flow") {
  const OdeSolution sol =
      integrate(kLeading, empty_sites_state(1), {0.0, 0.5, 1.0, 1.5, 2.0});
  REQUIRE(sol.times.size() == 5);
  REQUIRE(sol.states.size() == 5);
  for (size_t i = 0; i < sol.times.size(); ++i) {
    CHECK(sol.gamma[i] ==
          doctest::Approx(gamma_closed_form_A1(1.0, 1.0, sol.times[i])).epsilon(1e-9));
    CHECK(sol.states[i].in_simplex(1e-9));
    // at rho = 1 the empty site fraction and the condensate fraction coincide,
    // so the escape rate theta = y_0 tracks gamma exactly
    CHECK(sol.theta[i] == doctest::Approx(sol.gamma[i]).epsilon(1e-9));
  }
  CHECK(sol.h > 0.0);
  CHECK(sol.max_violation <= 1e-9);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(integrate_fixed(kLeading, empty_sites_state(1), {}, 0.1), ConfigError);
  CHECK_THROWS_AS(integrate_fixed(kLeading, empty_sites_state(1), {0.0, 1.0}, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(integrate_fixed(kLeading, empty_sites_state(1), {1.0, 0.5}, 0.1),
                  ConfigError);
}

TEST_CASE("a wildly large step is rejected rather than clamped") {
  const ModelParams stiff{RateSpec::inclusion(1, 5.0), 4.0};
  CHECK_THROWS_AS(integrate_fixed(stiff, empty_sites_state(1), {0.0, 2.0}, 2.0),
                  StepRejected);
  // the adaptive driver halves its way out of the same start
  const OdeSolution sol = integrate(stiff, empty_sites_state(1), {0.0, 2.0});
  CHECK(sol.gamma.back() > 0.0);
  CHECK(sol.states.back().in_simplex(1e-9));
}

TEST_CASE("single rk4 step matches a one interval fixed integration") {
  const ModelParams p{RateSpec::two_phase(2, {1.0, 1.5}, {0.8, 1.2, 2.0}), 3.0};
  const ControlState y = empty_sites_state(2);
  const double h = 0.05;
  const ControlState stepped = rk4_single_step(p, y, h);
  const OdeSolution sol = integrate_fixed(p, y, {0.0, h}, h);
  REQUIRE(sol.states.back().A() == 2);
  CHECK(sol.states.back().y[0] == stepped.y[0]);
  CHECK(sol.states.back().y[1] == stepped.y[1]);
}

TEST_CASE("long time limits match the stationary condensate fraction") {
  LongTimeResult sup =
      long_time_gamma({RateSpec::inclusion(1, 1.0), 2.0}, empty_sites_state(1));
  CHECK(sup.converged);
  CHECK(sup.gamma_limit == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(sup.drift_norm < 1e-12);

  LongTimeResult sup2 =
      long_time_gamma({RateSpec::inclusion(2, 0.7), 3.0}, empty_sites_state(2));
  CHECK(sup2.converged);
  CHECK(sup2.gamma_limit == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  // subcritical: the condensate evaporates
  LongTimeResult sub =
      long_time_gamma({RateSpec::inclusion(1, 1.0), 0.25}, empty_sites_state(1), 200.0);
  CHECK(sub.gamma_limit < 1e-6);
}
