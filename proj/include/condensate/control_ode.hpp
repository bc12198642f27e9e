#pragma once

#include <vector>

#include "condensate/model.hpp"

namespace condensate {

// state with every site empty: y_0 = 1, so gamma = 1
ControlState empty_sites_state(int A);

// one RK4 step of size h, exposed for drivers that advance other state in
// lockstep with the environment
ControlState rk4_single_step(const ModelParams& params, const ControlState& y,
                             double h, double clamp_budget = 1e-9);

struct OdeOptions {
  double h_init = 1e-2;
  double endpoint_tol = 1e-10;  // halving stops once the endpoint settles
  double clamp_budget = 1e-9;   // simplex violation absorbed per step
  int max_halvings = 16;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<ControlState> states;
  std::vector<double> gamma;  // gamma(y) along the path
  std::vector<double> theta;  // theta(y) along the path
  double h = 0.0;             // accepted step size
  double max_violation = 0.0; // worst simplex overshoot absorbed by clamping
};

// Classic RK4 with a fixed step; every grid interval is subdivided evenly
// so each grid time is hit exactly. Coordinates that overshoot the simplex
// by at most clamp_budget are clamped; a larger violation throws
// StepRejected.
OdeSolution integrate_fixed(const ModelParams& params, const ControlState& y0,
                            const std::vector<double>& grid, double h,
                            double clamp_budget = 1e-9);

// Step halving wrapper: halves h until the final state moves by less than
// endpoint_tol between consecutive refinements, then returns the finer run.
// Throws StepRejected when max_halvings refinements are not enough.
OdeSolution integrate(const ModelParams& params, const ControlState& y0,
                      const std::vector<double>& grid,
                      const OdeOptions& opts = {});

struct LongTimeResult {
  double gamma_limit = 0.0;
  bool converged = false;  // drift fell below tol before the horizon
  double t_reached = 0.0;
  double drift_norm = 0.0;  // sup norm of the drift at the final state
  ControlState y_end;
};

// Integrate until the drift sup norm drops below tol (a fixed point within
// numerical resolution) or the horizon is reached. Non convergence is
// reported in the flag, not thrown.
LongTimeResult long_time_gamma(const ModelParams& params,
                               const ControlState& y0, double horizon = 1e4,
                               double tol = 1e-12);

}  // namespace condensate
