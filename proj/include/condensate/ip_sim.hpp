#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "condensate/configuration.hpp"
#include "condensate/model.hpp"
#include "condensate/rng.hpp"

namespace condensate {

enum class InitKind { AllOnes, SinglePile, UniformRandom, Histogram, SlowEquilibrium };

struct InitialCondition {
  InitKind kind = InitKind::SinglePile;
  std::map<long long, long long> histogram;  // used by Histogram only

  static InitialCondition all_ones() { return {InitKind::AllOnes, {}}; }
  static InitialCondition single_pile() { return {InitKind::SinglePile, {}}; }
  static InitialCondition uniform_random() { return {InitKind::UniformRandom, {}}; }
  static InitialCondition slow_equilibrium() { return {InitKind::SlowEquilibrium, {}}; }
  static InitialCondition from_histogram(std::map<long long, long long> h) {
    return {InitKind::Histogram, std::move(h)};
  }

  static InitialCondition parse(const std::string& name);
  std::string name() const;
};

// Concrete occupations for the requested initial law. Only UniformRandom
// consumes randomness; everything else is deterministic in (spec, L, N).
// Throws InfeasibleInitial when L sites cannot hold N particles as asked.
std::vector<long long> build_occupations(const InitialCondition& ic,
                                         const RateSpec& spec, int L,
                                         long long N, RngStream& rng);

struct EventRecord {
  double dt = 0.0;  // holding time that elapsed before this event
  int source = -1;
  int target = -1;
  bool moved = false;  // false for a discarded diagonal draw
};

// Continuous time jump chain of the particle system. Events fire at rate
// S1 * S2, a source is drawn with weight u1 and a target with weight u2;
// draws landing on the same site are discarded without moving, which thins
// the stream to exactly the off diagonal rates u1(eta_i) u2(eta_j).
class SimState {
 public:
  SimState(const RateSpec& spec, int L, long long N, const InitialCondition& ic,
           std::uint64_t seed);

  EventRecord step();  // throws Frozen when the total rate is zero

  double clock() const { return clock_; }
  const Configuration& config() const { return config_; }
  Configuration& config() { return config_; }
  unsigned long long events() const { return events_; }
  unsigned long long moves() const { return moves_; }
  RngStream& rng() { return rng_; }

 private:
  RngStream rng_;
  Configuration config_;
  double clock_ = 0.0;
  unsigned long long events_ = 0;
  unsigned long long moves_ = 0;
};

struct ObservableSpec {
  bool gamma = true;         // gamma_N
  bool slow_profile = true;  // y_0 .. y_{A-1}
  bool fast_fraction = true;
  int phi_max = 0;       // phi_2 .. phi_{phi_max} of the embedded state
  int top_clusters = 0;  // x_1 .. x_k largest cluster fractions
};

struct SeriesBlock {
  std::vector<double> times;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[i] belongs to times[i]
};

// Run the chain across the grid and record left limits: the value at a
// grid time is the state after the last event strictly before it. The
// event stream does not depend on the grid, so two runs from the same
// seed agree path by path no matter how they are observed. A frozen chain
// simply repeats its final state for the remaining grid points.
SeriesBlock observe_path(SimState& state, const std::vector<double>& grid,
                         const ObservableSpec& what);

// time average of the fast site fraction over [0, T]; consumes the state
double integrated_fast_fraction(SimState& state, double T);

// n equally spaced points from 0 to T inclusive
std::vector<double> uniform_grid(double T, int n);

}  // namespace condensate
