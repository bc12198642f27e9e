#pragma once

#include <cstdint>
#include <vector>

#include "condensate/configuration.hpp"
#include "condensate/model.hpp"
#include "condensate/rng.hpp"

namespace condensate {

// sticks needed so the unassigned mass E[prod(1-U_i)] = (theta/(1+theta))^K
// falls below eps
int default_stick_count(double theta, double eps = 1e-10);

// the deterministic residual allocation recursion: V_1 = U_1,
// V_{i+1} = U_{i+1} (1 - V_1 - ... - V_i)
std::vector<double> stick_break_weights(const std::vector<double>& unit_fracs);

struct PdSample {
  std::vector<double> v;  // weights in generation order
  KingmanVector x;        // the same weights sorted descending
  double residual;        // mass beyond the truncation, prod(1 - U_i) scaled
};

// K sticks with U_i ~ Beta(1, theta)
PdSample stick_break(double theta, int sticks, RngStream& rng);

// the same law with every weight scaled by `scale`; scale = 0 short
// circuits to the zero vector without consuming randomness
PdSample sample_pd_scaled(double theta, double scale, int sticks,
                          RngStream& rng);

// E[phi_m] under the scaled law: scale^m (m-1)! / prod_{j=1}^{m-1} (theta+j)
double pd_moment(int m, double theta, double scale = 1.0);

// Cluster diffusion on the M-simplex: z holds the first M-1 coordinates,
// the M-th is implied as 1 - sum. The slow profile y rides along and is
// advanced by one deterministic RK4 substep per diffusion step.
struct WfState {
  std::vector<double> z;
  ControlState y;
  double t = 0.0;

  int M() const { return static_cast<int>(z.size()) + 1; }
};

struct WfStepInfo {
  // Every type died within one step, so the renormalization had no mass to
  // work with and the state was reset to a single atom. Unreachable in
  // practice; kept as a visible alarm.
  bool degenerate = false;
};

// Exact transition of the square root diffusion
//   dX = (a - b X) dt + sqrt(2 X) dW
// over a window of length dt, drawn from its Poisson-Gamma mixture:
//   c = (1 - e^{-b dt}) / (2b),   J ~ Poisson(x0 e^{-b dt} / (2c)),
//   X' = 2c * Gamma(a + J).
// a = 0 makes the origin absorbing (J = 0 returns exactly 0), which is the
// boundary behaviour Euler discretizations get wrong.
double cir_transition(double x0, double a, double b, double dt,
                      RngStream& rng);

// One diffusion step. Every type mass (the tracked z_i plus the implied
// top coordinate) advances independently by the exact cir_transition with
// immigration a = beta/(M-1) and decay b = beta, and the vector is then
// renormalized to total mass one. Normalizing a vector of independent
// square root diffusions reproduces the simplex drift
// beta ((1-z_i)/(M-1) - z_i) and noise covariance 2 (diag(z) - z z^T),
// up to a time distortion by the pre-normalization total mass, which
// starts each step at exactly 1; the induced weak error is O(dt). The
// per-coordinate transitions keep the 0 boundary exact, so dust types
// with mass far below sqrt(dt) need no clipping. The y substep is one
// matching RK4 stage so the environment stays on the diffusion clock.
WfStepInfo wf_step(WfState& state, const ModelParams& params, double dt,
                   RngStream& rng);

// the frozen environment version: gamma = 1 and constant mutation rate beta
WfStepInfo wf_step_classical(std::vector<double>& z, double beta, double dt,
                             RngStream& rng);

// scale the full coordinate vector (z, 1 - sum z) by gamma(y) and sort
EmbeddedState project_cluster_state(const WfState& state,
                                    const ModelParams& params);

struct WfMomentSeries {
  std::vector<double> times;
  std::vector<double> phi2_mean, phi2_se, phi3_mean, phi3_se;
  std::vector<double> gamma, theta;  // deterministic environment track
  double guard_fraction = 0.0;       // share of steps that hit a guard reset
  int paths = 0;
};

// Monte Carlo moments of the projected state at the grid times. Grid times
// are snapped to the nearest step boundary. Each path uses the child
// stream derive_seed(master_seed, path).
WfMomentSeries run_wf_moments(const ModelParams& params, const ControlState& y0,
                              const KingmanVector& x0, int M, double dt,
                              const std::vector<double>& grid, int paths,
                              std::uint64_t master_seed);

}  // namespace condensate
