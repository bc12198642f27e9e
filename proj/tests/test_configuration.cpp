#include <doctest.h>

#include <cmath>
#include <vector>

#include "condensate/configuration.hpp"

using namespace condensate;

TEST_CASE("fenwick tree prefix sums and weighted sampling") {
  FenwickTree tree(3);
  tree.add(0, 2);
  tree.add(2, 3);
  CHECK(tree.total() == 5);
  CHECK(tree.prefix(0) == 0);
  CHECK(tree.prefix(1) == 2);
  CHECK(tree.prefix(2) == 2);
  CHECK(tree.prefix(3) == 5);
  // sample returns the first index whose cumulative weight exceeds the target,
  // so the zero-weight middle site is unreachable
  CHECK(tree.sample(0) == 0);
  CHECK(tree.sample(1) == 0);
  CHECK(tree.sample(2) == 2);
  CHECK(tree.sample(4) == 2);
  tree.add(0, -2);
  CHECK(tree.total() == 3);
  CHECK(tree.sample(0) == 2);
}

TEST_CASE("category bookkeeping on a fixed occupation vector") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  Configuration cfg(spec, {0, 1, 3, 0});
  CHECK(cfg.L() == 4);
  CHECK(cfg.N() == 4);
  CHECK(cfg.slow_count(0) == 2);
  CHECK(cfg.slow_count(1) == 1);
  CHECK(cfg.fast_count() == 1);
  CHECK(cfg.excess_total() == 2);
  CHECK(cfg.gamma_N() == doctest::Approx(0.5));
  cfg.recount_and_check();
}

TEST_CASE("total departure and arrival weights match brute force") {
  RngStream rng(314);
  const RateSpec spec = RateSpec::two_phase(2, {0.8, 1.3}, {0.6, 1.1, 2.0});
  for (int trial = 0; trial < 20; ++trial) {
    const int L = 6;
    std::vector<long long> occ(L);
    for (auto& n : occ) n = static_cast<long long>(rng.below(5));
    Configuration cfg(spec, occ);
    double s1 = 0.0, s2 = 0.0, diag = 0.0;
    for (int i = 0; i < L; ++i) {
      s1 += u1(spec, L, occ[i]);
      s2 += u2(spec, L, occ[i]);
      diag += u1(spec, L, occ[i]) * u2(spec, L, occ[i]);
    }
    CHECK(cfg.S1() == doctest::Approx(s1).epsilon(1e-12));
    CHECK(cfg.S2() == doctest::Approx(s2).epsilon(1e-12));
    CHECK(cfg.diagonal_mass() == doctest::Approx(diag).epsilon(1e-12));
  }
}

TEST_CASE("moving a particle keeps the counts in sync") {
  const RateSpec spec = RateSpec::inclusion(2, 0.5);
  Configuration cfg(spec, {4, 1, 0, 2});
  const long long n = cfg.N();
  cfg.move_particle(0, 2);
  CHECK(cfg.occupation(0) == 3);
  CHECK(cfg.occupation(2) == 1);
  CHECK(cfg.N() == n);
  cfg.recount_and_check();
  cfg.move_particle(3, 3);  // a diagonal move is a no-op on the state
  CHECK(cfg.occupation(3) == 2);
  cfg.recount_and_check();
}

TEST_CASE("site sampling never lands on zero-weight sites") {
  RngStream rng(2718);
  const RateSpec spec = RateSpec::two_phase(1, {1.0}, {0.5, 1.0});
  Configuration cfg(spec, {0, 5, 0, 2});
  for (int i = 0; i < 2000; ++i) {
    const int from = cfg.sample_u1_site(rng);
    // sites 0 and 2 are empty, so they cannot send
    CHECK((from == 1 || from == 3));
    const int to = cfg.sample_u2_site(rng);
    CHECK(u2(spec, cfg.L(), cfg.occupation(to)) > 0.0);
  }
}

TEST_CASE("embedding splits fast excess from the slow profile") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  Configuration cfg(spec, {0, 1, 3, 7});
  const EmbeddedState es = cfg.embed();
  // excess 2 and 6 over A = 1, total excess 8, N = 11
  REQUIRE(es.x.size() == 2);
  CHECK(es.x[0] == doctest::Approx(6.0 / 11.0));
  CHECK(es.x[1] == doctest::Approx(2.0 / 11.0));
  REQUIRE(es.y.A() == 1);
  CHECK(es.y.y[0] == doctest::Approx(0.25));
  // the implied top coordinate also absorbs the fast sites at finite L
  CHECK(es.y.y_top() == doctest::Approx(0.75));
  CHECK(cfg.gamma_N() == doctest::Approx(8.0 / 11.0));
}

TEST_CASE("monomials of the cluster vector") {
  const KingmanVector x{0.5, 0.3};
  CHECK(phi_m(x, 2) == doctest::Approx(0.34));
  CHECK(phi_m(x, 3) == doctest::Approx(0.152));
  CHECK(kingman_equal(x, {0.5, 0.3}));
  CHECK(kingman_equal(x, {0.5, 0.3, 0.0}));  // trailing zeros are padding
  CHECK_FALSE(kingman_equal(x, {0.5}));
  CHECK(kingman_equal({0.5, 0.3 + 1e-12}, x, 1e-10));
}

TEST_CASE("histogram text form is exact and order stable") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  Configuration cfg(spec, {0, 0, 3, 1});
  const auto hist = cfg.histogram();
  CHECK(histogram_to_string(hist) == "0:2 1:1 3:1");
  CHECK(histogram_from_string("0:2 1:1 3:1") == hist);
  CHECK_THROWS_AS(histogram_from_string("0:x"), ConfigError);
  CHECK_THROWS_AS(histogram_from_string("-1:2"), ConfigError);
}

TEST_CASE("single site rates at the extremes") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  // all mass piled on the tracked site: it can only send
  Configuration pile(spec, {20, 0, 0, 0});
  CHECK(up_probability_p(pile) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(total_rate_c(pile) > 0.0);
  // all mass elsewhere: the empty tracked site can only receive
  Configuration empty_here(spec, {0, 20, 0, 0});
  CHECK(up_probability_p(empty_here) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coupling bounds hold on both branches and fail when forced") {
  const RateSpec spec = RateSpec::two_phase(1, {1.0}, {1.0, 1.0}, 1.0);
  Configuration cfg(spec, {3, 1, 0, 1, 3, 0, 1, 3, 0, 1, 3, 1});
  // tracked site holds 3 > A, so the fast branch applies
  const CouplingReport rep = check_coupling_bounds(cfg, 0.1, 0, false);
  CHECK(rep.fast_branch);
  CHECK(rep.p <= rep.p_bound);
  CHECK(rep.c_lower <= rep.c);
  CHECK(rep.pass);
  // site 2 is slow, so only the upper rate bound applies there
  const CouplingReport slow = check_coupling_bounds(cfg, 0.1, 2, false);
  CHECK_FALSE(slow.fast_branch);
  CHECK(slow.c <= slow.c_upper);
  CHECK(slow.pass);
  // an absurd delta pushes the lower rate bound past the true rate
  const CouplingReport bad = check_coupling_bounds(cfg, 1e6, 0, false);
  CHECK_FALSE(bad.pass);
  CHECK_THROWS_AS(check_coupling_bounds(cfg, 1e6, 0, true), BoundViolation);
}
