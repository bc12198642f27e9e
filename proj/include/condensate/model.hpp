#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "condensate/errors.hpp"
#include "condensate/rng.hpp"

namespace condensate {

// A site with n particles is "slow" when n <= A and "fast" when n > A.
// Fast sites send and receive at rate n - A plus lower order terms; slow
// sites work at rates of order 1/L. Two concrete families are supported:
//
//   TwoPhase   u1(n) = q_n / L for 0 < n <= A, n - A above, 0 at n = 0
//              u2(n) = r_n / L for 0 <= n <= A, n - A above
//
//   Inclusion  the two-parameter family with q_k = r_k = theta. Same as
//              TwoPhase except that u2 keeps its theta / L term in the
//              fast phase as well, so u2(n) = n - A + theta / L there.
//
// Both satisfy |u1(n) - q_n / L| = 0 on the slow phase and
// |u2(n) - (n - A)| <= zeta_L in the fast phase with zeta_L = zeta_scale / L.
enum class RateKind { TwoPhase, Inclusion };

struct RateSpec {
  RateKind kind = RateKind::TwoPhase;
  int A = 0;
  std::vector<double> q;  // q_1 .. q_A (q_0 is identically 0)
  std::vector<double> r;  // r_0 .. r_A
  double zeta_scale = 0.0;             // zeta_L = zeta_scale / L
  std::optional<double> theta_cap;     // the single rate of the Inclusion family

  static RateSpec inclusion(int A, double theta);
  static RateSpec two_phase(int A, std::vector<double> q, std::vector<double> r,
                            double zeta_scale = 0.0);

  double q_at(int k) const;  // k = 0..A, q_0 = 0
  double r_at(int k) const;  // k = 0..A
  double q_min() const;      // over k = 1..A (returns +inf when A = 0)
  double r_max() const;      // over k = 0..A
  double zeta(int L) const { return zeta_scale / static_cast<double>(L); }

  void validate() const;  // throws ConfigError
};

bool operator==(const RateSpec& a, const RateSpec& b);

// jump rates at a site holding n particles, system width L
double u1(const RateSpec& spec, int L, long long n);
double u2(const RateSpec& spec, int L, long long n);

struct ModelParams {
  RateSpec spec;
  double rho = 1.0;  // particle density N / L

  void validate() const;
  double rho_c() const;      // critical density of the slow profile
  double gamma_bar() const;  // long time condensate fraction (1 - rho_c/rho)+
};

// Slow phase profile: y_k is the fraction of sites holding k particles,
// k = 0 .. A-1; the top coordinate y_A is implied as 1 - sum of the rest.
struct ControlState {
  std::vector<double> y;

  int A() const { return static_cast<int>(y.size()); }
  double sum_below() const;
  double y_top() const;  // implied y_A, clamped at 0 against rounding
  // true when every coordinate is >= -tol and the sum is <= 1 + tol
  bool in_simplex(double tol = 1e-10) const;
};

// condensate fraction 1 - (1/rho) * sum_k k y_k, clamped at 0
double gamma_of_y(const ModelParams& params, const ControlState& y);

// net escape rate theta(y) = sum_k (r_k - q_k) y_k
double theta_of_y(const ModelParams& params, const ControlState& y);

// drift of the slow profile: component k of the birth and death flow
//   b_k = rho gamma(y) (q_{k+1} y_{k+1} + r_{k-1} y_{k-1} - (q_k + r_k) y_k)
std::vector<double> drift_b(const ModelParams& params, const ControlState& y);

// mutation rate seen by the cluster coordinates:
//   beta = theta(y) + sum_k b_k(y) d_k gamma(y) / gamma(y)
// Throws DegenerateGamma when gamma(y) = 0.
double beta_of_y(const ModelParams& params, const ControlState& y);

// the closed form r_A y_A, which extends beta continuously to gamma = 0
double beta_bar(const RateSpec& spec, const ControlState& y);

// normalized fixed point of the slow flow, entries k = 0..A
std::vector<double> fixed_point_ybar(const RateSpec& spec);

// critical density sum_k k ybar_k
double rho_crit(const RateSpec& spec);

// Condensate fraction for A = 1 with q_1 = r_0 = r_1 = theta: the logistic
// flow dg/dt = theta g (2 rho (1 - g) - 1) solved in closed form from
// gamma(0) = gamma0. The rho = 1/2 branch is the degenerate limit.
double gamma_closed_form_A1(double theta, double rho, double t,
                            double gamma0 = 1.0);

// uniform sample from the simplex of slow profiles (Dirichlet(1,...,1)
// over A+1 coordinates, last one implied)
ControlState random_control_state(int A, RngStream& rng);

// rate table with q_k, r_k drawn from [0.5, 2], r_k >= q_k, for property tests
RateSpec random_two_phase_spec(int A, RngStream& rng);

// json keys: kind, A, theta, q, r, zeta_scale
void to_json(nlohmann::json& j, const RateSpec& spec);
void from_json(const nlohmann::json& j, RateSpec& spec);
void to_json(nlohmann::json& j, const ModelParams& params);
void from_json(const nlohmann::json& j, ModelParams& params);

std::string rate_spec_to_string(const RateSpec& spec);
RateSpec rate_spec_from_string(const std::string& text);

}  // namespace condensate
