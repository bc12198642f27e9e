#include "condensate/moment_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "condensate/control_ode.hpp"

namespace condensate {

MonomialIndex MonomialIndex::of(std::vector<int> exponents) {
  for (int e : exponents)
    if (e < 2)
      throw ConfigError("monomial: exponents must be at least 2 (phi_1 is a "
                        "power of gamma by convention)");
  std::sort(exponents.begin(), exponents.end());
  MonomialIndex idx;
  idx.m = std::move(exponents);
  return idx;
}

int MonomialIndex::degree() const {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

std::string MonomialIndex::label() const {
  if (m.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) s += '*';
    s += "phi" + std::to_string(m[i]);
  }
  return s;
}

bool MonomialIndex::operator<(const MonomialIndex& o) const {
  const int da = degree(), db = o.degree();
  if (da != db) return da < db;
  return m < o.m;
}

MonomialAction act_on_monomial(const MonomialIndex& m) {
  MonomialAction act;
  act.source = m;
  const size_t n = m.m.size();
  // merge duplicate reduced monomials as they appear
  std::map<std::pair<int, std::vector<int>>, long long> terms;
  auto add_term = [&](long long coef, int gamma_pow, std::vector<int> mono) {
    std::sort(mono.begin(), mono.end());
    terms[{gamma_pow, std::move(mono)}] += coef;
  };

  for (size_t l = 0; l < n; ++l) {
    const long long ml = m.m[l];
    act.a_const += ml * (ml - 1);
    act.a_theta += ml;
    // one factor loses a power; a bare phi_1 factor becomes a gamma power
    std::vector<int> mono;
    int gamma_pow = 0;
    for (size_t k = 0; k < n; ++k) {
      if (k == l) continue;
      mono.push_back(m.m[k]);
    }
    if (ml - 1 == 1)
      gamma_pow = 1;
    else
      mono.push_back(static_cast<int>(ml) - 1);
    add_term(ml * (ml - 1), gamma_pow, std::move(mono));
  }
  // ordered pairs of distinct factors merge into one
  for (size_t l = 0; l < n; ++l) {
    for (size_t k = 0; k < n; ++k) {
      if (k == l) continue;
      const long long coef = static_cast<long long>(m.m[l]) * m.m[k];
      act.a_const += coef;
      std::vector<int> mono;
      for (size_t j = 0; j < n; ++j)
        if (j != l && j != k) mono.push_back(m.m[j]);
      mono.push_back(m.m[l] + m.m[k] - 1);
      add_term(coef, 0, std::move(mono));
    }
  }

  for (auto& [key, coef] : terms) {
    if (coef == 0) continue;
    ActionTerm t;
    t.coef = coef;
    t.gamma_pow = key.first;
    t.mono.m = key.second;
    act.g.push_back(std::move(t));
  }
  return act;
}

double evaluate_action(const MonomialAction& act, const KingmanVector& x,
                       double gamma, double theta) {
  double g_val = 0.0;
  const double phi1 = phi_m(x, 1);
  for (const ActionTerm& t : act.g) {
    double v = static_cast<double>(t.coef) * std::pow(phi1, t.gamma_pow);
    for (int e : t.mono.m) v *= phi_m(x, e);
    g_val += v;
  }
  double src = 1.0;
  for (int e : act.source.m) src *= phi_m(x, e);
  return gamma * g_val -
         (static_cast<double>(act.a_const) +
          static_cast<double>(act.a_theta) * theta) *
             src;
}

double apply_generator_numeric(const MonomialIndex& m, const KingmanVector& x,
                               double gamma, double theta) {
  const size_t n = x.size();
  const size_t f = m.m.size();
  // power sums and per factor values
  std::vector<double> p(f);
  for (size_t l = 0; l < f; ++l) p[l] = phi_m(x, m.m[l]);

  auto prod_except = [&](size_t skip) {
    double v = 1.0;
    for (size_t l = 0; l < f; ++l)
      if (l != skip) v *= p[l];
    return v;
  };
  auto prod_except2 = [&](size_t s1, size_t s2) {
    double v = 1.0;
    for (size_t l = 0; l < f; ++l)
      if (l != s1 && l != s2) v *= p[l];
    return v;
  };

  // first partials d phi / d x_i
  std::vector<double> d1(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < f; ++l)
      d1[i] += m.m[l] * std::pow(x[i], m.m[l] - 1) * prod_except(l);

  double acc = 0.0;
  // second order part: sum_ij x_i (gamma delta_ij - x_j) d2_ij
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (size_t l = 0; l < f; ++l) {
        const int ml = m.m[l];
        if (i == j)
          d2 += static_cast<double>(ml) * (ml - 1) * std::pow(x[i], ml - 2) *
                prod_except(l);
        for (size_t k = 0; k < f; ++k) {
          if (k == l) continue;
          d2 += static_cast<double>(ml) * m.m[k] * std::pow(x[i], ml - 1) *
                std::pow(x[j], m.m[k] - 1) * prod_except2(l, k);
        }
      }
      const double w = i == j ? x[i] * (gamma - x[j]) : -x[i] * x[j];
      acc += w * d2;
    }
  }
  // drift part: -theta sum_i x_i d1_i
  for (size_t i = 0; i < n; ++i) acc -= theta * x[i] * d1[i];
  return acc;
}

int MomentSystem::index_of(const MonomialIndex& m) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), m);
  if (it == indices.end() || !(*it == m)) return -1;
  return static_cast<int>(it - indices.begin());
}

MomentSystem build_moment_system(std::vector<MonomialIndex> targets,
                                 int n_max) {
  MomentSystem sys;
  sys.n_max = n_max;
  std::vector<MonomialIndex> todo = std::move(targets);
  std::vector<MonomialIndex> seen;
  for (const MonomialIndex& t : todo) {
    if (t.degree() > n_max) {
      std::ostringstream msg;
      msg << "moment system: " << t.label() << " has degree " << t.degree()
          << ", cap is " << n_max;
      throw DegreeCapExceeded(msg.str());
    }
  }
  while (!todo.empty()) {
    MonomialIndex cur = todo.back();
    todo.pop_back();
    if (cur.m.empty()) continue;  // the constant is not a system variable
    if (std::find(seen.begin(), seen.end(), cur) != seen.end()) continue;
    seen.push_back(cur);
    const MonomialAction act = act_on_monomial(cur);
    for (const ActionTerm& t : act.g) todo.push_back(t.mono);
  }
  std::sort(seen.begin(), seen.end());
  sys.indices = std::move(seen);
  sys.actions.reserve(sys.indices.size());
  sys.term_index.resize(sys.indices.size());
  for (size_t i = 0; i < sys.indices.size(); ++i) {
    sys.actions.push_back(act_on_monomial(sys.indices[i]));
    for (const ActionTerm& t : sys.actions[i].g) {
      const int idx = t.mono.m.empty() ? -1 : sys.index_of(t.mono);
      if (idx < 0 && !t.mono.m.empty())
        throw std::logic_error("moment system: closure missed " +
                               t.mono.label());
      sys.term_index[i].push_back(idx);
    }
  }
  return sys;
}

namespace {

// shared fixed step RK4 over the combined state (moments and, when the
// environment is live, the slow profile)
MomentTrack solve_hierarchy_impl(const MomentSystem& sys,
                                 const ModelParams* params,
                                 const ControlState* y0, double gamma_c,
                                 double theta_c, const KingmanVector& x0,
                                 const std::vector<double>& grid, double h) {
  if (grid.empty()) throw ConfigError("hierarchy: empty grid");
  if (!(h > 0.0)) throw ConfigError("hierarchy: step must be positive");
  const size_t ni = sys.indices.size();
  const bool live = params != nullptr;

  std::vector<double> E(ni);
  for (size_t i = 0; i < ni; ++i) {
    double v = 1.0;
    for (int e : sys.indices[i].m) v *= phi_m(x0, e);
    E[i] = v;
  }
  ControlState y = live ? *y0 : ControlState{};

  auto moment_rhs = [&](const std::vector<double>& cur, double g, double th,
                        std::vector<double>& out) {
    for (size_t i = 0; i < ni; ++i) {
      const MonomialAction& act = sys.actions[i];
      double gsum = 0.0;
      for (size_t t = 0; t < act.g.size(); ++t) {
        const ActionTerm& term = act.g[t];
        double v = static_cast<double>(term.coef);
        for (int pw = 0; pw < term.gamma_pow; ++pw) v *= g;
        const int idx = sys.term_index[i][t];
        if (idx >= 0) v *= cur[static_cast<size_t>(idx)];
        gsum += v;
      }
      out[i] = g * gsum -
               (static_cast<double>(act.a_const) +
                static_cast<double>(act.a_theta) * th) *
                   cur[i];
    }
  };

  MomentTrack track;
  track.times = grid;
  track.indices = sys.indices;

  auto record = [&]() {
    const double g = live ? gamma_of_y(*params, y) : gamma_c;
    const double th = live ? theta_of_y(*params, y) : theta_c;
    track.values.push_back(E);
    track.gamma.push_back(g);
    track.theta.push_back(th);
  };

  // one RK4 step of size hh for [E; y]
  std::vector<double> k1(ni), k2(ni), k3(ni), k4(ni), tmp(ni);
  auto step = [&](double hh) {
    const double g0 = live ? gamma_of_y(*params, y) : gamma_c;
    const double t0 = live ? theta_of_y(*params, y) : theta_c;
    ControlState y2, y3, y4;
    double g2 = gamma_c, t2 = theta_c, g3 = gamma_c, t3 = theta_c;
    std::vector<double> b1, b2, b3, b4;
    if (live) {
      b1 = drift_b(*params, y);
      auto shift = [&](const std::vector<double>& b, double c) {
        ControlState s = y;
        for (size_t i = 0; i < s.y.size(); ++i) s.y[i] += c * b[i];
        return s;
      };
      y2 = shift(b1, hh / 2);
      g2 = gamma_of_y(*params, y2);
      t2 = theta_of_y(*params, y2);
      b2 = drift_b(*params, y2);
      y3 = shift(b2, hh / 2);
      g3 = gamma_of_y(*params, y3);
      t3 = theta_of_y(*params, y3);
      b3 = drift_b(*params, y3);
      y4 = shift(b3, hh);
      b4 = drift_b(*params, y4);
    }
    const double g4 = live ? gamma_of_y(*params, y4) : gamma_c;
    const double t4 = live ? theta_of_y(*params, y4) : theta_c;

    moment_rhs(E, g0, t0, k1);
    for (size_t i = 0; i < ni; ++i) tmp[i] = E[i] + hh / 2 * k1[i];
    moment_rhs(tmp, g2, t2, k2);
    for (size_t i = 0; i < ni; ++i) tmp[i] = E[i] + hh / 2 * k2[i];
    moment_rhs(tmp, g3, t3, k3);
    for (size_t i = 0; i < ni; ++i) tmp[i] = E[i] + hh * k3[i];
    moment_rhs(tmp, g4, t4, k4);
    for (size_t i = 0; i < ni; ++i)
      E[i] += hh / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (live) {
      for (size_t i = 0; i < y.y.size(); ++i)
        y.y[i] += hh / 6 * (b1[i] + 2 * b2[i] + 2 * b3[i] + b4[i]);
      // same simplex clamp as the standalone integrator
      double sum = 0.0;
      for (double& v : y.y) {
        if (v < 0.0) {
          if (v < -1e-9) throw StepRejected("hierarchy: profile left simplex");
          v = 0.0;
        }
        sum += v;
      }
      if (sum > 1.0) {
        if (sum - 1.0 > 1e-9)
          throw StepRejected("hierarchy: profile left simplex");
        for (double& v : y.y) v /= sum;
      }
    }
  };

  double t = grid.front();
  record();
  for (size_t gidx = 1; gidx < grid.size(); ++gidx) {
    const double span = grid[gidx] - t;
    if (span < 0.0) throw ConfigError("hierarchy: grid must be ascending");
    const int steps = std::max(1, static_cast<int>(std::ceil(span / h - 1e-12)));
    const double hh = span / steps;
    for (int i = 0; i < steps; ++i) step(hh);
    t = grid[gidx];
    record();
  }
  return track;
}

}  // namespace

MomentTrack solve_hierarchy(const MomentSystem& sys, const ModelParams& params,
                            const ControlState& y0, const KingmanVector& x0,
                            const std::vector<double>& grid, double h) {
  return solve_hierarchy_impl(sys, &params, &y0, 0.0, 0.0, x0, grid, h);
}

MomentTrack solve_hierarchy_const(const MomentSystem& sys, double gamma_c,
                                  double theta_c, const KingmanVector& x0,
                                  const std::vector<double>& grid, double h) {
  return solve_hierarchy_impl(sys, nullptr, nullptr, gamma_c, theta_c, x0, grid,
                              h);
}

namespace {

std::string format_state(const ControlState& y) {
  std::ostringstream s;
  s << "y=(";
  for (size_t i = 0; i < y.y.size(); ++i) {
    if (i) s << ", ";
    s << y.y[i];
  }
  s << ")";
  return s.str();
}

}  // namespace

AssumptionReport validate_control_assumptions(const ModelParams& params,
                                              int samples, std::uint64_t seed,
                                              const DriftFn& drift) {
  const RateSpec& spec = params.spec;
  const int A = spec.A;
  RngStream rng(seed);
  auto eval_drift = [&](const ControlState& y) {
    return drift ? drift(params, y) : drift_b(params, y);
  };
  auto mean_occupation = [&](const ControlState& y) {
    double m = A * y.y_top();
    for (int k = 0; k < A; ++k) m += k * y.y[static_cast<size_t>(k)];
    return m;
  };
  AssumptionReport rep;

  // (a) the drift vanishes on the frozen set {gamma = 0}
  {
    AssumptionCheck chk{"drift-vanishes-on-frozen-set", true, 0.0, ""};
    if (params.rho >= A) {
      chk.witness = "vacuous: rho >= A leaves no room for gamma = 0";
    } else {
      for (int s = 0; s < samples; ++s) {
        ControlState y = random_control_state(A, rng);
        const double m = mean_occupation(y);
        if (m < params.rho) {
          // slide toward the top heavy corner until the mean hits rho
          const double t = (params.rho - m) / (A - m);
          for (double& v : y.y) v *= 1.0 - t;
        }
        double worst = 0.0;
        for (double v : eval_drift(y)) worst = std::max(worst, std::abs(v));
        if (worst > chk.worst) {
          chk.worst = worst;
          if (worst > 1e-12) {
            chk.pass = false;
            chk.witness = format_state(y) + " has |b| = " + std::to_string(worst);
          }
        }
      }
    }
    rep.checks.push_back(std::move(chk));
  }

  // (b) the drift points inward on every simplex face
  {
    AssumptionCheck chk{"drift-points-inward-on-faces", true, 0.0, ""};
    for (int s = 0; s < samples && A > 0; ++s) {
      ControlState y = random_control_state(A, rng);
      const int face = s % (A + 1);
      if (face < A) {
        y.y[static_cast<size_t>(face)] = 0.0;
        const std::vector<double> b = eval_drift(y);
        const double v = b[static_cast<size_t>(face)];
        chk.worst = std::max(chk.worst, -v);
        if (v < -1e-12 && chk.pass) {
          chk.pass = false;
          chk.witness = format_state(y) + " pushes y_" + std::to_string(face) +
                        " below 0 at rate " + std::to_string(-v);
        }
      } else {
        // top face y_A = 0: scale so the explicit coordinates sum to 1
        const double sum = y.sum_below();
        for (double& v : y.y) v /= sum;
        const std::vector<double> b = eval_drift(y);
        double total = 0.0;
        for (double v : b) total += v;
        chk.worst = std::max(chk.worst, total);
        if (total > 1e-12 && chk.pass) {
          chk.pass = false;
          chk.witness =
              format_state(y) + " grows sum(y) at rate " + std::to_string(total);
        }
      }
    }
    rep.checks.push_back(std::move(chk));
  }

  // (c) difference quotients stay below the explicit Lipschitz constants
  {
    AssumptionCheck chk{"lipschitz-quotients-bounded", true, 0.0, ""};
    const double L_gamma = A * (A + 1) / 2.0 / params.rho;
    double L_theta = 0.0;
    for (int k = 0; k < A; ++k)
      L_theta += std::abs((spec.r_at(k) - spec.q_at(k)) -
                          (spec.r_at(A) - spec.q_at(A)));
    const double L_beta = spec.r_at(A) * std::max(1, A);
    // generous constant for the drift itself: gamma and the flow are both
    // Lipschitz, the implied top coordinate moves A times faster
    double coeff = 0.0;
    for (int k = 0; k <= A; ++k) coeff += spec.q_at(k) + spec.r_at(k);
    const double L_b = params.rho * coeff * (L_gamma + A + 1.0);
    for (int s = 0; s < samples; ++s) {
      const ControlState ya = random_control_state(A, rng);
      const ControlState yb = random_control_state(A, rng);
      double dy = 0.0;
      for (int k = 0; k < A; ++k)
        dy = std::max(dy, std::abs(ya.y[static_cast<size_t>(k)] -
                                   yb.y[static_cast<size_t>(k)]));
      if (dy < 1e-12) continue;
      struct Item {
        const char* what;
        double diff;
        double constant;
      };
      const std::vector<double> ba = drift_b(params, ya);
      const std::vector<double> bb = drift_b(params, yb);
      double db = 0.0;
      for (size_t k = 0; k < ba.size(); ++k)
        db = std::max(db, std::abs(ba[k] - bb[k]));
      const Item items[] = {
          {"gamma", std::abs(gamma_of_y(params, ya) - gamma_of_y(params, yb)),
           L_gamma},
          {"theta", std::abs(theta_of_y(params, ya) - theta_of_y(params, yb)),
           L_theta},
          {"beta_bar", std::abs(beta_bar(spec, ya) - beta_bar(spec, yb)),
           L_beta},
          {"drift", db, L_b},
      };
      for (const Item& it : items) {
        if (it.constant <= 0.0) continue;  // identically constant map
        const double ratio = it.diff / dy / it.constant;
        chk.worst = std::max(chk.worst, ratio);
        if (ratio > 1.0 + 1e-9 && chk.pass) {
          chk.pass = false;
          chk.witness = std::string(it.what) + " quotient " +
                        std::to_string(it.diff / dy) + " exceeds " +
                        std::to_string(it.constant);
        }
      }
    }
    rep.checks.push_back(std::move(chk));
  }

  // (d) beta_bar is nonnegative and extends beta
  {
    AssumptionCheck chk{"beta-nonnegative-and-consistent", true, 0.0, ""};
    for (int s = 0; s < samples; ++s) {
      const ControlState y = random_control_state(A, rng);
      const double bb = beta_bar(spec, y);
      if (bb < 0.0) {
        chk.pass = false;
        chk.worst = std::min(chk.worst, bb);
        chk.witness = format_state(y) + " has beta_bar = " + std::to_string(bb);
        continue;
      }
      if (gamma_of_y(params, y) > 0.0) {
        const double diff = std::abs(beta_of_y(params, y) - bb);
        chk.worst = std::max(chk.worst, diff);
        if (diff > 1e-12 && chk.pass) {
          chk.pass = false;
          chk.witness =
              format_state(y) + " has |beta - beta_bar| = " + std::to_string(diff);
        }
      }
    }
    rep.checks.push_back(std::move(chk));
  }

  rep.all_pass = true;
  for (const AssumptionCheck& c : rep.checks) rep.all_pass &= c.pass;
  return rep;
}

}  // namespace condensate
