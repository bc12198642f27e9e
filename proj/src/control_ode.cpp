#include "condensate/control_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace condensate {

ControlState empty_sites_state(int A) {
  ControlState y;
  y.y.assign(static_cast<size_t>(A), 0.0);
  if (A > 0) y.y[0] = 1.0;
  return y;
}

namespace {

// one RK4 step of size h, with the post step clamp onto the simplex
ControlState rk4_step(const ModelParams& params, const ControlState& y,
                      double h, double clamp_budget, double* max_violation) {
  const size_t A = y.y.size();
  auto shifted = [&](const std::vector<double>& k, double c) {
    ControlState s = y;
    for (size_t i = 0; i < A; ++i) s.y[i] += c * k[i];
    return s;
  };
  const std::vector<double> k1 = drift_b(params, y);
  const std::vector<double> k2 = drift_b(params, shifted(k1, h / 2));
  const std::vector<double> k3 = drift_b(params, shifted(k2, h / 2));
  const std::vector<double> k4 = drift_b(params, shifted(k3, h));
  ControlState out = y;
  for (size_t i = 0; i < A; ++i)
    out.y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  double viol = 0.0;
  double sum = 0.0;
  for (double& v : out.y) {
    if (v < 0.0) {
      viol = std::max(viol, -v);
      v = 0.0;
    }
    sum += v;
  }
  if (sum > 1.0) {
    viol = std::max(viol, sum - 1.0);
    for (double& v : out.y) v /= sum;
  }
  if (viol > clamp_budget) {
    std::ostringstream msg;
    msg << "rk4 step left the simplex by " << viol << " (budget "
        << clamp_budget << ", h = " << h << ")";
    throw StepRejected(msg.str());
  }
  if (max_violation) *max_violation = std::max(*max_violation, viol);
  return out;
}

}  // namespace

ControlState rk4_single_step(const ModelParams& params, const ControlState& y,
                             double h, double clamp_budget) {
  return rk4_step(params, y, h, clamp_budget, nullptr);
}

OdeSolution integrate_fixed(const ModelParams& params, const ControlState& y0,
                            const std::vector<double>& grid, double h,
                            double clamp_budget) {
  if (grid.empty()) throw ConfigError("integrate: empty grid");
  if (!(h > 0.0)) throw ConfigError("integrate: step must be positive");
  OdeSolution sol;
  sol.h = h;
  sol.times = grid;
  ControlState y = y0;
  double t = grid.front();
  sol.states.push_back(y);
  for (size_t g = 1; g < grid.size(); ++g) {
    const double span = grid[g] - t;
    if (span < 0.0) throw ConfigError("integrate: grid must be ascending");
    const int n = std::max(1, static_cast<int>(std::ceil(span / h - 1e-12)));
    const double hh = span / n;
    for (int i = 0; i < n; ++i)
      y = rk4_step(params, y, hh, clamp_budget, &sol.max_violation);
    t = grid[g];
    sol.states.push_back(y);
  }
  sol.gamma.reserve(sol.states.size());
  sol.theta.reserve(sol.states.size());
  for (const ControlState& s : sol.states) {
    sol.gamma.push_back(gamma_of_y(params, s));
    sol.theta.push_back(theta_of_y(params, s));
  }
  return sol;
}

OdeSolution integrate(const ModelParams& params, const ControlState& y0,
                      const std::vector<double>& grid, const OdeOptions& opts) {
  double h = opts.h_init;
  OdeSolution prev = integrate_fixed(params, y0, grid, h, opts.clamp_budget);
  for (int round = 0; round < opts.max_halvings; ++round) {
    h /= 2.0;
    OdeSolution next = integrate_fixed(params, y0, grid, h, opts.clamp_budget);
    double moved = 0.0;
    const std::vector<double>& a = prev.states.back().y;
    const std::vector<double>& b = next.states.back().y;
    for (size_t i = 0; i < a.size(); ++i)
      moved = std::max(moved, std::abs(a[i] - b[i]));
    if (a.empty())  // A = 0 has no coordinates; one refinement settles it
      moved = 0.0;
    if (moved < opts.endpoint_tol) return next;
    prev = std::move(next);
  }
  throw StepRejected("integrate: endpoint did not settle after halving");
}

LongTimeResult long_time_gamma(const ModelParams& params,
                               const ControlState& y0, double horizon,
                               double tol) {
  const double h = 1e-3;
  const double chunk = 1.0;
  LongTimeResult res;
  ControlState y = y0;
  double t = 0.0;
  auto drift_norm = [&](const ControlState& s) {
    double n = 0.0;
    for (double v : drift_b(params, s)) n = std::max(n, std::abs(v));
    return n;
  };
  res.drift_norm = drift_norm(y);
  while (t < horizon && res.drift_norm >= tol) {
    const double span = std::min(chunk, horizon - t);
    const int n = std::max(1, static_cast<int>(std::ceil(span / h - 1e-12)));
    const double hh = span / n;
    for (int i = 0; i < n; ++i) y = rk4_step(params, y, hh, 1e-9, nullptr);
    t += span;
    res.drift_norm = drift_norm(y);
  }
  res.converged = res.drift_norm < tol;
  res.t_reached = t;
  res.gamma_limit = gamma_of_y(params, y);
  res.y_end = std::move(y);
  return res;
}

}  // namespace condensate
