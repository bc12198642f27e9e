#include "condensate/ip_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace condensate {

InitialCondition InitialCondition::parse(const std::string& name) {
  if (name == "all-ones") return all_ones();
  if (name == "single-pile") return single_pile();
  if (name == "uniform-random") return uniform_random();
  if (name == "histogram") return {InitKind::Histogram, {}};
  if (name == "slow-equilibrium") return slow_equilibrium();
  throw ConfigError("initial condition: unknown name '" + name + "'");
}

std::string InitialCondition::name() const {
  switch (kind) {
    case InitKind::AllOnes: return "all-ones";
    case InitKind::SinglePile: return "single-pile";
    case InitKind::UniformRandom: return "uniform-random";
    case InitKind::Histogram: return "histogram";
    case InitKind::SlowEquilibrium: return "slow-equilibrium";
  }
  return "?";
}

namespace {

std::vector<long long> occupations_from_histogram(
    const std::map<long long, long long>& h, int L, long long N) {
  long long sites = 0, mass = 0;
  for (const auto& [k, count] : h) {
    if (k < 0 || count < 0)
      throw InfeasibleInitial("histogram: negative level or count");
    sites += count;
    mass += k * count;
  }
  if (sites != L)
    throw InfeasibleInitial("histogram: counts sum to " + std::to_string(sites) +
                            ", need L = " + std::to_string(L));
  if (mass != N)
    throw InfeasibleInitial("histogram: mass is " + std::to_string(mass) +
                            ", need N = " + std::to_string(N));
  std::vector<long long> eta;
  eta.reserve(static_cast<size_t>(L));
  for (const auto& [k, count] : h)
    eta.insert(eta.end(), static_cast<size_t>(count), k);
  return eta;
}

// slow profile occupations matching ybar on L - 1 sites by the largest
// remainder rule, with every leftover particle piled on site 0
std::vector<long long> slow_equilibrium_occupations(const RateSpec& spec,
                                                    int L, long long N) {
  if (L < 2) throw InfeasibleInitial("slow-equilibrium: needs L >= 2");
  const std::vector<double> ybar = fixed_point_ybar(spec);
  const int A = spec.A;
  const long long slots = L - 1;
  std::vector<long long> base(static_cast<size_t>(A) + 1);
  std::vector<std::pair<double, int>> frac;  // (-fractional part, level)
  long long placed = 0;
  for (int k = 0; k <= A; ++k) {
    const double target = ybar[static_cast<size_t>(k)] * static_cast<double>(slots);
    base[static_cast<size_t>(k)] = static_cast<long long>(std::floor(target));
    placed += base[static_cast<size_t>(k)];
    frac.push_back({-(target - std::floor(target)), k});
  }
  std::sort(frac.begin(), frac.end());  // biggest remainder first, then low k
  const long long leftover = slots - placed;
  for (long long i = 0; i < leftover; ++i)
    ++base[static_cast<size_t>(frac[static_cast<size_t>(i)].second)];
  long long mass = 0;
  for (int k = 0; k <= A; ++k) mass += k * base[static_cast<size_t>(k)];
  const long long pile = N - mass;
  if (pile < 0)
    throw InfeasibleInitial("slow-equilibrium: slow profile alone exceeds N");
  std::vector<long long> eta;
  eta.reserve(static_cast<size_t>(L));
  eta.push_back(pile);
  for (int k = 0; k <= A; ++k)
    eta.insert(eta.end(), static_cast<size_t>(base[static_cast<size_t>(k)]), k);
  return eta;
}

}  // namespace

std::vector<long long> build_occupations(const InitialCondition& ic,
                                         const RateSpec& spec, int L,
                                         long long N, RngStream& rng) {
  if (L < 1) throw ConfigError("initial condition: L must be positive");
  if (N < 0) throw ConfigError("initial condition: N must be nonnegative");
  switch (ic.kind) {
    case InitKind::AllOnes: {
      if (N != L)
        throw InfeasibleInitial("all-ones: needs N = L, got N = " +
                                std::to_string(N) + ", L = " + std::to_string(L));
      return std::vector<long long>(static_cast<size_t>(L), 1);
    }
    case InitKind::SinglePile: {
      std::vector<long long> eta(static_cast<size_t>(L), 0);
      eta[0] = N;
      return eta;
    }
    case InitKind::UniformRandom: {
      std::vector<long long> eta(static_cast<size_t>(L), 0);
      for (long long p = 0; p < N; ++p)
        ++eta[static_cast<size_t>(rng.below(static_cast<std::uint64_t>(L)))];
      return eta;
    }
    case InitKind::Histogram:
      return occupations_from_histogram(ic.histogram, L, N);
    case InitKind::SlowEquilibrium:
      return slow_equilibrium_occupations(spec, L, N);
  }
  throw ConfigError("initial condition: unhandled kind");
}

SimState::SimState(const RateSpec& spec, int L, long long N,
                   const InitialCondition& ic, std::uint64_t seed)
    : rng_(seed), config_(spec, build_occupations(ic, spec, L, N, rng_)) {}

EventRecord SimState::step() {
  const double total = config_.S1() * config_.S2();
  if (!(total > 0.0)) throw Frozen("step: jump chain has total rate zero");
  EventRecord ev;
  ev.dt = rng_.exponential(total);
  clock_ += ev.dt;
  ev.source = config_.sample_u1_site(rng_);
  ev.target = config_.sample_u2_site(rng_);
  ++events_;
  if (ev.source != ev.target) {
    config_.move_particle(ev.source, ev.target);
    ev.moved = true;
    ++moves_;
  }
  return ev;
}

namespace {

std::vector<std::string> observable_columns(const ObservableSpec& what, int A) {
  std::vector<std::string> cols;
  if (what.gamma) cols.push_back("gamma_N");
  if (what.slow_profile)
    for (int k = 0; k < A; ++k) cols.push_back("y_" + std::to_string(k));
  if (what.fast_fraction) cols.push_back("fast_fraction");
  for (int m = 2; m <= what.phi_max; ++m)
    cols.push_back("phi_" + std::to_string(m));
  for (int k = 1; k <= what.top_clusters; ++k)
    cols.push_back("x_" + std::to_string(k));
  return cols;
}

std::vector<double> observable_row(const Configuration& config,
                                   const ObservableSpec& what) {
  std::vector<double> row;
  if (what.gamma) row.push_back(config.gamma_N());
  if (what.slow_profile)
    for (int k = 0; k < config.spec().A; ++k)
      row.push_back(static_cast<double>(config.slow_count(k)) / config.L());
  if (what.fast_fraction)
    row.push_back(static_cast<double>(config.fast_count()) / config.L());
  if (what.phi_max >= 2 || what.top_clusters > 0) {
    const EmbeddedState e = config.embed();
    for (int m = 2; m <= what.phi_max; ++m) row.push_back(phi_m(e.x, m));
    for (int k = 1; k <= what.top_clusters; ++k)
      row.push_back(static_cast<size_t>(k) <= e.x.size()
                        ? e.x[static_cast<size_t>(k) - 1]
                        : 0.0);
  }
  return row;
}

}  // namespace

SeriesBlock observe_path(SimState& state, const std::vector<double>& grid,
                         const ObservableSpec& what) {
  SeriesBlock out;
  out.times = grid;
  out.columns = observable_columns(what, state.config().spec().A);
  out.rows.reserve(grid.size());
  size_t g = 0;
  while (g < grid.size()) {
    EventRecord ev;
    try {
      ev = state.step();
    } catch (const Frozen&) {
      // the current state is the left limit at every later grid time
      for (; g < grid.size(); ++g)
        out.rows.push_back(observable_row(state.config(), what));
      break;
    }
    if (g < grid.size() && grid[g] <= state.clock()) {
      // Grid times inside the holding interval see the state before this
      // event. Moves are exactly reversible, so undo, record, redo; the
      // event stream itself never depends on the grid.
      if (ev.moved) state.config().move_particle(ev.target, ev.source);
      for (; g < grid.size() && grid[g] <= state.clock(); ++g)
        out.rows.push_back(observable_row(state.config(), what));
      if (ev.moved) state.config().move_particle(ev.source, ev.target);
    }
  }
  return out;
}

double integrated_fast_fraction(SimState& state, double T) {
  if (!(T > 0.0)) throw ConfigError("integrated_fast_fraction: T must be positive");
  double acc = 0.0;
  double t = state.clock();
  const double t_end = t + T;
  while (t < t_end) {
    const double f =
        static_cast<double>(state.config().fast_count()) / state.config().L();
    try {
      state.step();
    } catch (const Frozen&) {
      acc += f * (t_end - t);
      return acc / T;
    }
    const double t_next = state.clock();
    acc += f * (std::min(t_next, t_end) - t);
    t = t_next;
  }
  return acc / T;
}

std::vector<double> uniform_grid(double T, int n) {
  if (n < 1) throw ConfigError("grid: needs at least one point");
  std::vector<double> g(static_cast<size_t>(n));
  if (n == 1) {
    g[0] = 0.0;
    return g;
  }
  for (int i = 0; i < n; ++i)
    g[static_cast<size_t>(i)] = T * static_cast<double>(i) / (n - 1);
  return g;
}

}  // namespace condensate
