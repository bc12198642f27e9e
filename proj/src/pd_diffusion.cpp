#include "condensate/pd_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "condensate/control_ode.hpp"

namespace condensate {

int default_stick_count(double theta, double eps) {
  if (!(theta > 0.0)) throw ConfigError("stick count: theta must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("stick count: eps in (0,1)");
  const double k = std::log(eps) / std::log(theta / (1.0 + theta));
  return std::max(1, static_cast<int>(std::ceil(k)));
}

std::vector<double> stick_break_weights(const std::vector<double>& unit_fracs) {
  std::vector<double> v(unit_fracs.size());
  double stick = 1.0;
  for (size_t i = 0; i < unit_fracs.size(); ++i) {
    v[i] = stick * unit_fracs[i];
    stick *= 1.0 - unit_fracs[i];
  }
  return v;
}

PdSample stick_break(double theta, int sticks, RngStream& rng) {
  if (sticks < 1) throw ConfigError("stick break: needs at least one stick");
  PdSample s;
  s.v.resize(static_cast<size_t>(sticks));
  double stick = 1.0;
  for (int i = 0; i < sticks; ++i) {
    const double u = rng.beta1(theta);
    s.v[static_cast<size_t>(i)] = stick * u;
    stick *= 1.0 - u;
  }
  s.residual = stick;
  s.x = s.v;
  std::sort(s.x.begin(), s.x.end(), std::greater<double>());
  return s;
}

PdSample sample_pd_scaled(double theta, double scale, int sticks,
                          RngStream& rng) {
  if (scale < 0.0) throw ConfigError("pd sample: scale must be nonnegative");
  if (scale == 0.0) return PdSample{{}, {}, 0.0};
  PdSample s = stick_break(theta, sticks, rng);
  for (double& v : s.v) v *= scale;
  for (double& v : s.x) v *= scale;
  s.residual *= scale;
  return s;
}

double pd_moment(int m, double theta, double scale) {
  if (m < 1) throw ConfigError("pd moment: m must be at least 1");
  if (!(theta > 0.0)) throw ConfigError("pd moment: theta must be positive");
  double v = std::pow(scale, m);
  for (int j = 1; j < m; ++j) v *= static_cast<double>(j) / (theta + j);
  return v;
}

namespace {

// one draw with the per-step constants already in hand: c and the Poisson
// intensity scale lam = e^{-b dt} / (2c)
double cir_draw(double x0, double a, double c, double lam, RngStream& rng) {
  const long long j = rng.poisson(x0 > 0.0 ? x0 * lam : 0.0);
  const double shape = a + static_cast<double>(j);
  if (shape <= 0.0) return 0.0;
  return 2.0 * c * rng.gamma_shape(shape);
}

// shared update of the cluster coordinates: exact square root diffusion
// transitions for all M types followed by one renormalization
WfStepInfo advance_clusters(std::vector<double>& z, double beta, double dt,
                            RngStream& rng) {
  const size_t n = z.size();  // M - 1
  if (n == 0) return {};
  const double a = beta / static_cast<double>(n);
  const double b = beta;
  const double c =
      b * dt > 1e-10 ? -std::expm1(-b * dt) / (2.0 * b)
                     : 0.5 * dt * (1.0 - 0.5 * b * dt);
  const double lam = std::exp(-b * dt) / (2.0 * c);

  double s = 0.0;
  for (double v : z) s += v;
  const double top = std::max(0.0, 1.0 - s);

  WfStepInfo info;
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    z[i] = cir_draw(z[i], a, c, lam, rng);
    sum += z[i];
  }
  const double new_top = cir_draw(top, a, c, lam, rng);
  sum += new_top;
  if (sum > 0.0) {
    for (double& v : z) v /= sum;
  } else {
    // all mass died inside one window; park everything in the top type
    for (double& v : z) v = 0.0;
    info.degenerate = true;
  }
  return info;
}

}  // namespace

double cir_transition(double x0, double a, double b, double dt,
                      RngStream& rng) {
  if (!(dt > 0.0)) throw ConfigError("cir transition: dt must be positive");
  if (a < 0.0 || b < 0.0 || x0 < 0.0)
    throw ConfigError("cir transition: negative parameter");
  const double c =
      b * dt > 1e-10 ? -std::expm1(-b * dt) / (2.0 * b)
                     : 0.5 * dt * (1.0 - 0.5 * b * dt);
  const double lam = std::exp(-b * dt) / (2.0 * c);
  return cir_draw(x0, a, c, lam, rng);
}

WfStepInfo wf_step(WfState& state, const ModelParams& params, double dt,
                   RngStream& rng) {
  const double beta = beta_bar(params.spec, state.y);
  const WfStepInfo info = advance_clusters(state.z, beta, dt, rng);
  // the environment is deterministic; one matching RK4 substep keeps it in
  // lockstep with the diffusion clock
  state.y = rk4_single_step(params, state.y, dt);
  state.t += dt;
  return info;
}

WfStepInfo wf_step_classical(std::vector<double>& z, double beta, double dt,
                             RngStream& rng) {
  return advance_clusters(z, beta, dt, rng);
}

EmbeddedState project_cluster_state(const WfState& state,
                                    const ModelParams& params) {
  EmbeddedState e;
  e.y = state.y;
  const double g = gamma_of_y(params, state.y);
  double s = 0.0;
  for (double v : state.z) s += v;
  e.x.reserve(state.z.size() + 1);
  for (double v : state.z)
    if (v > 0.0) e.x.push_back(g * v);
  const double top = 1.0 - s;
  if (top > 0.0) e.x.push_back(g * top);
  std::sort(e.x.begin(), e.x.end(), std::greater<double>());
  return e;
}

WfMomentSeries run_wf_moments(const ModelParams& params, const ControlState& y0,
                              const KingmanVector& x0, int M, double dt,
                              const std::vector<double>& grid, int paths,
                              std::uint64_t master_seed) {
  if (M < 2) throw ConfigError("wf moments: M must be at least 2");
  if (!(dt > 0.0)) throw ConfigError("wf moments: dt must be positive");
  if (paths < 2) throw ConfigError("wf moments: needs at least two paths");
  if (x0.size() > static_cast<size_t>(M) - 1)
    throw ConfigError("wf moments: more initial clusters than coordinates");

  const double g0 = gamma_of_y(params, y0);
  std::vector<double> z0(static_cast<size_t>(M) - 1, 0.0);
  if (g0 > 0.0)
    for (size_t i = 0; i < x0.size(); ++i) z0[i] = x0[i] / g0;

  // snap each grid time to a step index
  std::vector<std::pair<long long, size_t>> record_at;  // (step, grid cell)
  record_at.reserve(grid.size());
  long long last_step = 0;
  for (size_t gidx = 0; gidx < grid.size(); ++gidx) {
    const long long k = std::llround(grid[gidx] / dt);
    record_at.push_back({k, gidx});
    last_step = std::max(last_step, k);
  }
  std::sort(record_at.begin(), record_at.end());

  // The environment is deterministic and shared by every path, so its
  // track and the per step mutation rates are computed once up front.
  std::vector<double> beta_track(static_cast<size_t>(last_step), 0.0);
  std::vector<double> gamma_track(static_cast<size_t>(last_step) + 1, 0.0);
  std::vector<double> theta_track(static_cast<size_t>(last_step) + 1, 0.0);
  {
    ControlState y = y0;
    for (long long k = 0; k <= last_step; ++k) {
      gamma_track[static_cast<size_t>(k)] = gamma_of_y(params, y);
      theta_track[static_cast<size_t>(k)] = theta_of_y(params, y);
      if (k < last_step) {
        beta_track[static_cast<size_t>(k)] = beta_bar(params.spec, y);
        y = rk4_single_step(params, y, dt);
      }
    }
  }

  WfMomentSeries out;
  out.paths = paths;
  out.times = grid;
  const size_t G = grid.size();
  std::vector<double> m2(G, 0.0), s2(G, 0.0), m3(G, 0.0), s3(G, 0.0);
  out.gamma.assign(G, 0.0);
  out.theta.assign(G, 0.0);
  for (const auto& [k, gidx] : record_at) {
    out.gamma[gidx] = gamma_track[static_cast<size_t>(k)];
    out.theta[gidx] = theta_track[static_cast<size_t>(k)];
  }

  unsigned long long flagged = 0, total_steps = 0;
  std::vector<double> z;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(derive_seed(master_seed, static_cast<std::uint64_t>(p)));
    z = z0;
    size_t cursor = 0;
    for (long long k = 0; k <= last_step; ++k) {
      if (k > 0) {
        const WfStepInfo info =
            advance_clusters(z, beta_track[static_cast<size_t>(k) - 1], dt, rng);
        ++total_steps;
        if (info.degenerate) ++flagged;
      }
      for (; cursor < record_at.size() && record_at[cursor].first == k; ++cursor) {
        const size_t gidx = record_at[cursor].second;
        const double g = gamma_track[static_cast<size_t>(k)];
        double sum = 0.0, p2 = 0.0, p3 = 0.0;
        for (double v : z) {
          sum += v;
          p2 += v * v;
          p3 += v * v * v;
        }
        const double top = std::max(0.0, 1.0 - sum);
        p2 = (p2 + top * top) * g * g;
        p3 = (p3 + top * top * top) * g * g * g;
        // Welford accumulation over paths, one cell per grid time
        const double n = static_cast<double>(p + 1);
        const double d2 = p2 - m2[gidx];
        m2[gidx] += d2 / n;
        s2[gidx] += d2 * (p2 - m2[gidx]);
        const double d3 = p3 - m3[gidx];
        m3[gidx] += d3 / n;
        s3[gidx] += d3 * (p3 - m3[gidx]);
      }
    }
  }

  out.phi2_mean = m2;
  out.phi3_mean = m3;
  out.phi2_se.resize(G);
  out.phi3_se.resize(G);
  const double n = static_cast<double>(paths);
  for (size_t gidx = 0; gidx < G; ++gidx) {
    out.phi2_se[gidx] = std::sqrt(s2[gidx] / (n - 1.0) / n);
    out.phi3_se[gidx] = std::sqrt(s3[gidx] / (n - 1.0) / n);
  }
  out.guard_fraction =
      total_steps ? static_cast<double>(flagged) / static_cast<double>(total_steps)
                  : 0.0;
  return out;
}

}  // namespace condensate
