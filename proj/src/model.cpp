#include "condensate/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace condensate {

RateSpec RateSpec::inclusion(int A, double theta) {
  // checked before the size_t casts below, which would turn a negative A
  // into an absurd allocation instead of a ConfigError
  if (A < 0) throw ConfigError("rate spec: A must be nonnegative");
  RateSpec spec;
  spec.kind = RateKind::Inclusion;
  spec.A = A;
  spec.q.assign(static_cast<size_t>(A), theta);
  spec.r.assign(static_cast<size_t>(A) + 1, theta);
  spec.zeta_scale = theta;
  spec.theta_cap = theta;
  spec.validate();
  return spec;
}

RateSpec RateSpec::two_phase(int A, std::vector<double> q, std::vector<double> r,
                             double zeta_scale) {
  RateSpec spec;
  spec.kind = RateKind::TwoPhase;
  spec.A = A;
  spec.q = std::move(q);
  spec.r = std::move(r);
  spec.zeta_scale = zeta_scale;
  spec.validate();
  return spec;
}

double RateSpec::q_at(int k) const {
  if (k <= 0 || k > A) return 0.0;
  return q[static_cast<size_t>(k) - 1];
}

double RateSpec::r_at(int k) const {
  if (k < 0 || k > A) return 0.0;
  if (r.empty() && theta_cap) return *theta_cap;  // tolerated A = 0 shorthand
  return r[static_cast<size_t>(k)];
}

double RateSpec::q_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : q) m = std::min(m, v);
  return m;
}

double RateSpec::r_max() const {
  double m = 0.0;
  for (int k = 0; k <= A; ++k) m = std::max(m, r_at(k));
  return m;
}

void RateSpec::validate() const {
  if (A < 0) throw ConfigError("rate spec: A must be nonnegative");
  if (q.size() != static_cast<size_t>(A))
    throw ConfigError("rate spec: q must have one entry per level 1..A");
  const bool r_shorthand = r.empty() && A == 0 && theta_cap.has_value();
  if (!r_shorthand && r.size() != static_cast<size_t>(A) + 1)
    throw ConfigError("rate spec: r must have one entry per level 0..A");
  for (size_t k = 0; k < q.size(); ++k) {
    if (!(q[k] > 0.0))
      throw ConfigError("rate spec: q_" + std::to_string(k + 1) +
                        " must be positive");
  }
  for (size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] > 0.0))
      throw ConfigError("rate spec: r_" + std::to_string(k) +
                        " must be positive");
  }
  for (size_t k = 0; k < q.size(); ++k) {
    if (r.size() > k + 1 && r[k + 1] < q[k])
      throw ConfigError("rate spec: needs r_k >= q_k at k = " +
                        std::to_string(k + 1));
  }
  if (zeta_scale < 0.0)
    throw ConfigError("rate spec: zeta_scale must be nonnegative");
  if (theta_cap && !(*theta_cap > 0.0))
    throw ConfigError("rate spec: theta must be positive");
  if (kind == RateKind::Inclusion && !theta_cap)
    throw ConfigError("rate spec: inclusion kind needs theta");
}

bool operator==(const RateSpec& a, const RateSpec& b) {
  return a.kind == b.kind && a.A == b.A && a.q == b.q && a.r == b.r &&
         a.zeta_scale == b.zeta_scale && a.theta_cap == b.theta_cap;
}

double u1(const RateSpec& spec, int L, long long n) {
  if (n < 0) throw ZeroRate("u1: negative occupation");
  if (n == 0) return 0.0;
  if (n <= spec.A) return spec.q_at(static_cast<int>(n)) / L;
  return static_cast<double>(n - spec.A);
}

double u2(const RateSpec& spec, int L, long long n) {
  if (n < 0) throw ZeroRate("u2: negative occupation");
  if (n <= spec.A) return spec.r_at(static_cast<int>(n)) / L;
  double v = static_cast<double>(n - spec.A);
  // the inclusion family keeps its diffusive theta / L term on fast sites
  if (spec.kind == RateKind::Inclusion) v += *spec.theta_cap / L;
  return v;
}

void ModelParams::validate() const {
  spec.validate();
  if (!(rho > 0.0)) throw ConfigError("model: rho must be positive");
}

double ModelParams::rho_c() const { return rho_crit(spec); }

double ModelParams::gamma_bar() const {
  return std::max(0.0, 1.0 - rho_c() / rho);
}

double ControlState::sum_below() const {
  return std::accumulate(y.begin(), y.end(), 0.0);
}

double ControlState::y_top() const { return std::max(0.0, 1.0 - sum_below()); }

bool ControlState::in_simplex(double tol) const {
  double s = 0.0;
  for (double v : y) {
    if (v < -tol) return false;
    s += v;
  }
  return s <= 1.0 + tol;
}

namespace {

// the tracked entries index levels 0..A-1 of the rate table, so a length
// mismatch would silently price the profile with the wrong rates
void check_state_size(const RateSpec& spec, const ControlState& y,
                      const char* who) {
  if (y.A() != spec.A)
    throw ConfigError(std::string(who) + ": slow profile has " +
                      std::to_string(y.A()) +
                      " tracked entries, the rate table expects " +
                      std::to_string(spec.A));
}

}  // namespace

double gamma_of_y(const ModelParams& params, const ControlState& y) {
  check_state_size(params.spec, y, "gamma_of_y");
  const int A = y.A();
  double mean = A * y.y_top();
  for (int k = 0; k < A; ++k) mean += k * y.y[static_cast<size_t>(k)];
  return std::max(0.0, 1.0 - mean / params.rho);
}

double theta_of_y(const ModelParams& params, const ControlState& y) {
  check_state_size(params.spec, y, "theta_of_y");
  const RateSpec& spec = params.spec;
  const int A = y.A();
  double s = (spec.r_at(A) - spec.q_at(A)) * y.y_top();
  for (int k = 0; k < A; ++k)
    s += (spec.r_at(k) - spec.q_at(k)) * y.y[static_cast<size_t>(k)];
  return s;
}

std::vector<double> drift_b(const ModelParams& params, const ControlState& y) {
  check_state_size(params.spec, y, "drift_b");
  const RateSpec& spec = params.spec;
  const int A = y.A();
  std::vector<double> b(static_cast<size_t>(A), 0.0);
  if (A == 0) return b;
  const double pref = params.rho * gamma_of_y(params, y);
  auto yk = [&](int k) -> double {
    return k < A ? y.y[static_cast<size_t>(k)] : y.y_top();
  };
  for (int k = 0; k < A; ++k) {
    double flow = spec.q_at(k + 1) * yk(k + 1) - (spec.q_at(k) + spec.r_at(k)) * yk(k);
    if (k >= 1) flow += spec.r_at(k - 1) * yk(k - 1);
    b[static_cast<size_t>(k)] = pref * flow;
  }
  return b;
}

double beta_of_y(const ModelParams& params, const ControlState& y) {
  const double g = gamma_of_y(params, y);
  if (g <= 0.0)
    throw DegenerateGamma("beta_of_y: gamma(y) = 0, use beta_bar instead");
  const int A = y.A();
  const std::vector<double> b = drift_b(params, y);
  double s = theta_of_y(params, y);
  // d gamma / d y_k = (A - k) / rho on the half space where gamma > 0
  for (int k = 0; k < A; ++k)
    s += b[static_cast<size_t>(k)] * ((A - k) / params.rho) / g;
  return s;
}

double beta_bar(const RateSpec& spec, const ControlState& y) {
  check_state_size(spec, y, "beta_bar");
  return spec.r_at(spec.A) * y.y_top();
}

std::vector<double> fixed_point_ybar(const RateSpec& spec) {
  std::vector<double> w(static_cast<size_t>(spec.A) + 1, 1.0);
  for (int k = 1; k <= spec.A; ++k)
    w[static_cast<size_t>(k)] =
        w[static_cast<size_t>(k) - 1] * spec.r_at(k - 1) / spec.q_at(k);
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= z;
  return w;
}

double rho_crit(const RateSpec& spec) {
  const std::vector<double> ybar = fixed_point_ybar(spec);
  double s = 0.0;
  for (size_t k = 0; k < ybar.size(); ++k) s += static_cast<double>(k) * ybar[k];
  return s;
}

double gamma_closed_form_A1(double theta, double rho, double t, double gamma0) {
  if (gamma0 < 0.0 || gamma0 > 1.0) {
    throw ConfigError("gamma_closed_form_A1: gamma0 outside [0, 1]");
  }
  if (gamma0 == 0.0) return 0.0;
  const double a = theta * (2.0 * rho - 1.0);
  const double b = 2.0 * rho * theta;
  // degenerate branch: at rho = 1/2 the flow is dg/dt = -b g^2
  if (std::abs(2.0 * rho - 1.0) < 1e-8) {
    return gamma0 / (1.0 + b * gamma0 * t);
  }
  // logistic solution; for a < 0 the exponential blows up and the quotient
  // underflows to +0, the correct subcritical limit
  return a / (b + (a / gamma0 - b) * std::exp(-a * t));
}

ControlState random_control_state(int A, RngStream& rng) {
  // normalized exponentials give a uniform point of the A-simplex
  std::vector<double> e(static_cast<size_t>(A) + 1);
  double s = 0.0;
  for (double& v : e) {
    v = -std::log(rng.uniform_pos());
    s += v;
  }
  ControlState y;
  y.y.resize(static_cast<size_t>(A));
  for (int k = 0; k < A; ++k) y.y[static_cast<size_t>(k)] = e[static_cast<size_t>(k)] / s;
  return y;
}

RateSpec random_two_phase_spec(int A, RngStream& rng) {
  std::vector<double> q(static_cast<size_t>(A));
  std::vector<double> r(static_cast<size_t>(A) + 1);
  r[0] = 0.5 + 1.5 * rng.uniform();
  for (int k = 1; k <= A; ++k) {
    const double qk = 0.5 + 1.5 * rng.uniform();
    q[static_cast<size_t>(k) - 1] = qk;
    r[static_cast<size_t>(k)] = qk + (2.0 - qk) * rng.uniform();
  }
  return RateSpec::two_phase(A, std::move(q), std::move(r));
}

void to_json(nlohmann::json& j, const RateSpec& spec) {
  j = nlohmann::json{
      {"kind", spec.kind == RateKind::Inclusion ? "inclusion" : "two-phase"},
      {"A", spec.A},
      {"q", spec.q},
      {"r", spec.r},
      {"zeta_scale", spec.zeta_scale},
  };
  if (spec.theta_cap) j["theta"] = *spec.theta_cap;
}

void from_json(const nlohmann::json& j, RateSpec& spec) {
  static const std::vector<std::string> known = {"kind", "A",          "q",
                                                 "r",    "zeta_scale", "theta"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("rate spec: unknown key '" + it.key() + "'");
  }
  const std::string kind = j.value("kind", "two-phase");
  if (kind == "inclusion") {
    if (!j.contains("theta"))
      throw ConfigError("rate spec: inclusion kind needs theta");
    spec = RateSpec::inclusion(j.value("A", 0), j.at("theta").get<double>());
    // explicit tables override the theta fill-in when present
    if (j.contains("q")) spec.q = j.at("q").get<std::vector<double>>();
    if (j.contains("r")) spec.r = j.at("r").get<std::vector<double>>();
    if (j.contains("zeta_scale")) spec.zeta_scale = j.at("zeta_scale").get<double>();
    spec.validate();
    return;
  }
  if (kind != "two-phase")
    throw ConfigError("rate spec: unknown kind '" + kind + "'");
  spec = RateSpec{};
  spec.kind = RateKind::TwoPhase;
  spec.A = j.value("A", 0);
  spec.q = j.value("q", std::vector<double>{});
  spec.r = j.value("r", std::vector<double>{});
  if (j.contains("theta")) spec.theta_cap = j.at("theta").get<double>();
  spec.zeta_scale = j.value("zeta_scale", 0.0);
  spec.validate();
}

void to_json(nlohmann::json& j, const ModelParams& params) {
  j = nlohmann::json{{"rates", params.spec}, {"rho", params.rho}};
}

void from_json(const nlohmann::json& j, ModelParams& params) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "rates" && it.key() != "rho")
      throw ConfigError("model: unknown key '" + it.key() + "'");
  }
  params.spec = j.at("rates").get<RateSpec>();
  params.rho = j.at("rho").get<double>();
  params.validate();
}

std::string rate_spec_to_string(const RateSpec& spec) {
  nlohmann::json j = spec;
  return j.dump(2) + "\n";
}

RateSpec rate_spec_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("rate spec: ") + e.what());
  }
  return j.get<RateSpec>();
}

}  // namespace condensate
