#include <doctest.h>

#include <cmath>
#include <vector>

#include "condensate/control_ode.hpp"
#include "condensate/moment_oracle.hpp"

using namespace condensate;

namespace {

const ActionTerm* find_term(const MonomialAction& act, const std::string& label) {
  for (const ActionTerm& t : act.g)
    if (t.mono.label() == label) return &t;
  return nullptr;
}

// dereference with a test failure instead of UB when the term is missing
const ActionTerm& term_with(const MonomialAction& act, const std::string& label) {
  const ActionTerm* t = find_term(act, label);
  REQUIRE(t != nullptr);
  return *t;
}

}  // namespace

TEST_CASE("monomial indices sort, label and validate") {
  const MonomialIndex m = MonomialIndex::of({3, 2});
  CHECK(m.m == std::vector<int>{2, 3});
  CHECK(m.degree() == 5);
  CHECK(m.label() == "phi2*phi3");
  CHECK(MonomialIndex::of({}).label() == "1");
  CHECK(MonomialIndex::of({}).degree() == 0);
  CHECK(MonomialIndex::of({2}) < MonomialIndex::of({3}));
  // equal degree falls back to entrywise order
  CHECK(MonomialIndex::of({2, 2}) < MonomialIndex::of({4}));
  CHECK_THROWS_AS(MonomialIndex::of({1, 2}), ConfigError);
  CHECK_THROWS_AS(MonomialIndex::of({0}), ConfigError);
}

TEST_CASE("generator action on the low monomials, frozen") {
  SUBCASE("phi2") {
    const MonomialAction act = act_on_monomial(MonomialIndex::of({2}));
    CHECK(act.a_const == 2);
    CHECK(act.a_theta == 2);
    REQUIRE(act.g.size() == 1);
    CHECK(act.g[0].coef == 2);
    CHECK(act.g[0].gamma_pow == 1);
    CHECK(act.g[0].mono.label() == "1");
  }
  SUBCASE("phi3") {
    const MonomialAction act = act_on_monomial(MonomialIndex::of({3}));
    CHECK(act.a_const == 6);
    CHECK(act.a_theta == 3);
    REQUIRE(act.g.size() == 1);
    CHECK(act.g[0].coef == 6);
    CHECK(act.g[0].gamma_pow == 0);
    CHECK(act.g[0].mono.label() == "phi2");
  }
  SUBCASE("phi2*phi2") {
    const MonomialAction act = act_on_monomial(MonomialIndex::of({2, 2}));
    CHECK(act.a_const == 12);
    CHECK(act.a_theta == 4);
    REQUIRE(act.g.size() == 2);
    CHECK(term_with(act, "phi2").coef == 4);
    CHECK(term_with(act, "phi2").gamma_pow == 1);
    CHECK(term_with(act, "phi3").coef == 8);
    CHECK(term_with(act, "phi3").gamma_pow == 0);
  }
  SUBCASE("phi2*phi3") {
    const MonomialAction act = act_on_monomial(MonomialIndex::of({2, 3}));
    CHECK(act.a_const == 20);
    CHECK(act.a_theta == 5);
    REQUIRE(act.g.size() == 3);
    CHECK(term_with(act, "phi3").coef == 2);
    CHECK(term_with(act, "phi3").gamma_pow == 1);
    CHECK(term_with(act, "phi2*phi2").coef == 6);
    CHECK(term_with(act, "phi4").coef == 12);
  }
}

TEST_CASE("every action term drops the degree by exactly one") {
  for (const auto& exps : std::vector<std::vector<int>>{
           {2}, {3}, {4}, {5}, {6}, {2, 2}, {2, 3}, {2, 4}, {3, 3}, {2, 2, 2}}) {
    const MonomialIndex m = MonomialIndex::of(exps);
    const MonomialAction act = act_on_monomial(m);
    CHECK(act.source == m);
    for (const ActionTerm& t : act.g) {
      CHECK(t.mono.degree() + t.gamma_pow == m.degree() - 1);
      CHECK(t.coef > 0);
    }
  }
}

TEST_CASE("reduced action agrees with the analytic generator") {
  // the reduction treats phi_1 as gamma, so the comparison point must sit
  // on the slice sum x_i = gamma
  RngStream rng(612);
  for (const auto& exps : std::vector<std::vector<int>>{
           {2}, {3}, {4}, {5}, {6}, {2, 2}, {2, 3}, {2, 4}, {3, 3}, {2, 2, 2}}) {
    const MonomialIndex m = MonomialIndex::of(exps);
    const MonomialAction act = act_on_monomial(m);
    for (int trial = 0; trial < 5; ++trial) {
      KingmanVector x(4);
      for (double& v : x) v = 0.01 + 0.19 * rng.uniform();
      double gamma = 0.0;
      for (double v : x) gamma += v;
      const double theta = 2.0 * rng.uniform();
      const double reduced = evaluate_action(act, x, gamma, theta);
      const double direct = apply_generator_numeric(m, x, gamma, theta);
      CHECK(std::abs(reduced - direct) <= 1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("moment systems close under the action") {
  const MomentSystem sys = build_moment_system({MonomialIndex::of({2, 2})});
  REQUIRE(sys.indices.size() == 3);
  CHECK(sys.indices[0].label() == "phi2");
  CHECK(sys.indices[1].label() == "phi3");
  CHECK(sys.indices[2].label() == "phi2*phi2");
  CHECK(sys.index_of(MonomialIndex::of({2})) == 0);
  CHECK(sys.index_of(MonomialIndex::of({5})) == -1);
  REQUIRE(sys.term_index.size() == 3);
  for (size_t i = 0; i < sys.actions.size(); ++i) {
    REQUIRE(sys.term_index[i].size() == sys.actions[i].g.size());
    for (size_t t = 0; t < sys.term_index[i].size(); ++t) {
      const int idx = sys.term_index[i][t];
      if (sys.actions[i].g[t].mono.m.empty()) {
        CHECK(idx == -1);
      } else {
        REQUIRE(idx >= 0);
        CHECK(sys.indices[static_cast<size_t>(idx)] == sys.actions[i].g[t].mono);
      }
    }
  }
  CHECK_THROWS_AS(build_moment_system({MonomialIndex::of({4, 4})}, 6),
                  DegreeCapExceeded);
}

TEST_CASE("frozen environment hierarchy matches the scalar closed form") {
  // with gamma = theta = 1, E[phi_2]' = 2 - 4 E[phi_2]
  const MomentSystem sys = build_moment_system({MonomialIndex::of({2})});
  const std::vector<double> grid{0.0, 0.25, 1.0};
  const MomentTrack track = solve_hierarchy_const(sys, 1.0, 1.0, {1.0}, grid);
  const int i2 = sys.index_of(MonomialIndex::of({2}));
  REQUIRE(i2 >= 0);
  REQUIRE(track.values.size() == 3);
  for (size_t g = 0; g < grid.size(); ++g) {
    const double expect = 0.5 + 0.5 * std::exp(-4.0 * grid[g]);
    CHECK(track.values[g][static_cast<size_t>(i2)] ==
          doctest::Approx(expect).epsilon(1e-9));
    CHECK(track.gamma[g] == 1.0);
    CHECK(track.theta[g] == 1.0);
  }
}

TEST_CASE("driven hierarchy rides the control flow") {
  const ModelParams p{RateSpec::inclusion(1, 1.0), 1.0};
  const MomentSystem sys =
      build_moment_system({MonomialIndex::of({2}), MonomialIndex::of({3})});
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const MomentTrack track =
      solve_hierarchy(sys, p, empty_sites_state(1), {1.0}, grid);
  const int i2 = sys.index_of(MonomialIndex::of({2}));
  const int i3 = sys.index_of(MonomialIndex::of({3}));
  for (size_t g = 0; g < grid.size(); ++g) {
    CHECK(track.gamma[g] ==
          doctest::Approx(gamma_closed_form_A1(1.0, 1.0, grid[g])).epsilon(1e-8));
    const double e2 = track.values[g][static_cast<size_t>(i2)];
    const double e3 = track.values[g][static_cast<size_t>(i3)];
    CHECK(e2 <= 1.0 + 1e-12);
    CHECK(e3 <= e2 + 1e-12);  // phi_3 <= phi_2 pointwise on the simplex
    CHECK(e3 >= 0.0);
  }
}

TEST_CASE("control flow assumptions hold and faults are caught") {
  const ModelParams p{RateSpec::inclusion(1, 1.0), 0.6};
  const AssumptionReport ok = validate_control_assumptions(p, 300, 17);
  REQUIRE(ok.checks.size() == 4);
  CHECK(ok.all_pass);
  for (const AssumptionCheck& c : ok.checks) CHECK(c.pass);

  // a drift that refuses to vanish on the frozen set
  const AssumptionReport bad_a = validate_control_assumptions(
      p, 300, 17, [](const ModelParams&, const ControlState& y) {
        return std::vector<double>(static_cast<size_t>(y.A()), 1.0);
      });
  CHECK_FALSE(bad_a.all_pass);
  CHECK(bad_a.checks[0].name == "drift-vanishes-on-frozen-set");
  CHECK_FALSE(bad_a.checks[0].pass);
  CHECK_FALSE(bad_a.checks[0].witness.empty());

  // the true drift with its sign flipped points outward on the faces
  const AssumptionReport bad_b = validate_control_assumptions(
      p, 300, 17, [](const ModelParams& params, const ControlState& y) {
        std::vector<double> b = drift_b(params, y);
        for (double& v : b) v = -v;
        return b;
      });
  CHECK(bad_b.checks[0].pass);  // negated zero still vanishes
  CHECK(bad_b.checks[1].name == "drift-points-inward-on-faces");
  CHECK_FALSE(bad_b.checks[1].pass);
}
