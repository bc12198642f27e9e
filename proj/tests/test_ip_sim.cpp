#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "condensate/ip_sim.hpp"

using namespace condensate;

TEST_CASE("initial condition names round trip") {
  for (const char* name : {"all-ones", "single-pile", "uniform-random",
                           "histogram", "slow-equilibrium"}) {
    CHECK(InitialCondition::parse(name).name() == name);
  }
  CHECK_THROWS_AS(InitialCondition::parse("bogus"), ConfigError);
}

TEST_CASE("occupation builders honor their contracts") {
  RngStream rng(7);
  const RateSpec spec = RateSpec::inclusion(1, 1.0);

  SUBCASE("single pile") {
    const auto eta = build_occupations(InitialCondition::single_pile(), spec, 4, 9, rng);
    CHECK(eta == std::vector<long long>{9, 0, 0, 0});
  }
  SUBCASE("all ones needs N = L") {
    const auto eta = build_occupations(InitialCondition::all_ones(), spec, 5, 5, rng);
    CHECK(eta == std::vector<long long>(5, 1));
    CHECK_THROWS_AS(build_occupations(InitialCondition::all_ones(), spec, 5, 6, rng),
                    InfeasibleInitial);
  }
  SUBCASE("uniform random conserves mass") {
    const auto eta =
        build_occupations(InitialCondition::uniform_random(), spec, 6, 40, rng);
    CHECK(eta.size() == 6);
    CHECK(std::accumulate(eta.begin(), eta.end(), 0LL) == 40);
    CHECK(*std::min_element(eta.begin(), eta.end()) >= 0);
  }
  SUBCASE("histogram is exact or refused") {
    const auto eta = build_occupations(
        InitialCondition::from_histogram({{0, 2}, {3, 1}}), spec, 3, 3, rng);
    CHECK(eta == std::vector<long long>{0, 0, 3});
    CHECK_THROWS_AS(build_occupations(InitialCondition::from_histogram({{0, 2}, {3, 1}}),
                                      spec, 4, 3, rng),
                    InfeasibleInitial);
    CHECK_THROWS_AS(build_occupations(InitialCondition::from_histogram({{0, 2}, {3, 1}}),
                                      spec, 3, 5, rng),
                    InfeasibleInitial);
  }
  SUBCASE("slow equilibrium piles the leftovers on site 0") {
    // ybar is uniform on {0, 1}, so 10 background sites split 5 and 5
    const auto eta =
        build_occupations(InitialCondition::slow_equilibrium(), spec, 11, 20, rng);
    CHECK(eta.size() == 11);
    CHECK(std::accumulate(eta.begin(), eta.end(), 0LL) == 20);
    CHECK(eta[0] == 15);
    for (size_t i = 1; i < eta.size(); ++i) CHECK(eta[i] <= spec.A);
    CHECK_THROWS_AS(
        build_occupations(InitialCondition::slow_equilibrium(), spec, 11, 2, rng),
        InfeasibleInitial);
  }
  SUBCASE("degenerate sizes are configuration errors") {
    CHECK_THROWS_AS(build_occupations(InitialCondition::single_pile(), spec, 0, 3, rng),
                    ConfigError);
    CHECK_THROWS_AS(build_occupations(InitialCondition::single_pile(), spec, 3, -1, rng),
                    ConfigError);
  }
}

TEST_CASE("events conserve particles and thin the diagonal") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  SimState state(spec, 8, 16, InitialCondition::single_pile(), 123);
  const long long N = state.config().N();
  unsigned long long moved = 0;
  for (int i = 0; i < 500; ++i) {
    const auto before = state.config().occupations();
    const EventRecord ev = state.step();
    CHECK(ev.dt > 0.0);
    const auto& after = state.config().occupations();
    if (ev.moved) {
      ++moved;
      CHECK(ev.source != ev.target);
      CHECK(after[static_cast<size_t>(ev.source)] ==
            before[static_cast<size_t>(ev.source)] - 1);
      CHECK(after[static_cast<size_t>(ev.target)] ==
            before[static_cast<size_t>(ev.target)] + 1);
    } else {
      CHECK(ev.source == ev.target);
      CHECK(after == before);
    }
  }
  CHECK(state.config().N() == N);
  CHECK(state.events() == 500);
  CHECK(state.moves() == moved);
  CHECK(moved > 0);
  state.config().recount_and_check();
}

TEST_CASE("an empty system is frozen") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  SimState state(spec, 4, 0, InitialCondition::single_pile(), 5);
  CHECK_THROWS_AS(state.step(), Frozen);
  // observation still works, repeating the frozen state across the grid
  ObservableSpec what;
  SimState again(spec, 4, 0, InitialCondition::single_pile(), 5);
  const SeriesBlock block = observe_path(again, {0.0, 1.0, 2.0}, what);
  REQUIRE(block.rows.size() == 3);
  for (const auto& row : block.rows) CHECK(row[0] == 0.0);  // gamma_N
}

TEST_CASE("the event stream does not depend on the observation grid") {
  const RateSpec spec = RateSpec::two_phase(1, {1.0}, {1.0, 2.0});
  ObservableSpec what;
  what.phi_max = 2;
  SimState a(spec, 10, 30, InitialCondition::single_pile(), 999);
  SimState b(spec, 10, 30, InitialCondition::single_pile(), 999);
  const SeriesBlock coarse = observe_path(a, uniform_grid(0.5, 6), what);
  const SeriesBlock fine = observe_path(b, uniform_grid(0.5, 11), what);
  REQUIRE(coarse.columns == fine.columns);
  // coarse point i sits at fine point 2i; left limits must agree bitwise
  for (size_t i = 0; i < coarse.times.size(); ++i) {
    REQUIRE(coarse.times[i] == fine.times[2 * i]);
    CHECK(coarse.rows[i] == fine.rows[2 * i]);
  }
}

TEST_CASE("observable columns are named in a fixed order") {
  const RateSpec spec = RateSpec::inclusion(2, 1.0);
  SimState state(spec, 6, 12, InitialCondition::single_pile(), 77);
  ObservableSpec what;
  what.phi_max = 3;
  what.top_clusters = 2;
  const SeriesBlock block = observe_path(state, {0.0, 0.1}, what);
  const std::vector<std::string> expect{"gamma_N", "y_0",   "y_1",  "fast_fraction",
                                        "phi_2",   "phi_3", "x_1",  "x_2"};
  CHECK(block.columns == expect);
  REQUIRE(block.rows.size() == 2);
  CHECK(block.rows[0].size() == expect.size());
  // at time zero the pile holds everything: gamma_N = (12 - 2) / 12
  CHECK(block.rows[0][0] == doctest::Approx(10.0 / 12.0));
  // and the top cluster is the whole excess
  CHECK(block.rows[0][6] == doctest::Approx(10.0 / 12.0));
  CHECK(block.rows[0][7] == 0.0);
}

TEST_CASE("time averaged fast fraction is a fraction") {
  const RateSpec spec = RateSpec::inclusion(1, 1.0);
  SimState state(spec, 8, 24, InitialCondition::uniform_random(), 2024);
  const double f = integrated_fast_fraction(state, 2.0);
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
  CHECK(state.clock() >= 2.0);
  CHECK_THROWS_AS(integrated_fast_fraction(state, 0.0), ConfigError);
}

TEST_CASE("uniform grids hit both endpoints") {
  const std::vector<double> g = uniform_grid(2.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(g[1] == doctest::Approx(0.5));
  CHECK(uniform_grid(3.0, 1) == std::vector<double>{0.0});
  CHECK_THROWS_AS(uniform_grid(1.0, 0), ConfigError);
}
