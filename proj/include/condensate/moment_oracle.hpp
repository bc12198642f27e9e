#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "condensate/configuration.hpp"
#include "condensate/model.hpp"

namespace condensate {

// A product of power sums phi_m = prod_l phi_{m_l}(x) with every exponent
// at least 2; exponents are kept sorted ascending. phi_1 never appears as
// a factor here: on the boundary where the process lives, sum x_i equals
// gamma(t), so phi_1 factors produced by the generator are carried as
// explicit powers of gamma instead.
struct MonomialIndex {
  std::vector<int> m;

  static MonomialIndex of(std::vector<int> exponents);  // sorts, validates
  int degree() const;
  std::string label() const;  // "phi2", "phi2*phi3", "1" for the empty product

  bool operator==(const MonomialIndex& o) const { return m == o.m; }
  bool operator<(const MonomialIndex& o) const;  // by degree, then entries
};

// one additive term: coef * gamma^gamma_pow * phi_mono
struct ActionTerm {
  long long coef = 0;
  int gamma_pow = 0;
  MonomialIndex mono;
};

// The generator action on a monomial reduces to
//   A phi_m = gamma(t) * sum(terms) - (a_const + a_theta * theta(t)) phi_m,
// with every term of total degree exactly degree(m) - 1.
struct MonomialAction {
  MonomialIndex source;
  std::vector<ActionTerm> g;
  long long a_const = 0;
  long long a_theta = 0;
};

MonomialAction act_on_monomial(const MonomialIndex& m);

// evaluate the reduced form at a concrete point, phi_1 taken as sum x_i
double evaluate_action(const MonomialAction& act, const KingmanVector& x,
                       double gamma, double theta);

// Independent oracle: the second order operator
//   sum_ij x_i (gamma delta_ij - x_j) d2/dx_i dx_j - theta sum_i x_i d/dx_i
// applied to phi_m by analytic partial derivatives over the support of x.
// No symbolic reduction is shared with act_on_monomial.
double apply_generator_numeric(const MonomialIndex& m, const KingmanVector& x,
                               double gamma, double theta);

// closed moment system: the targets plus every monomial their actions reach
struct MomentSystem {
  int n_max = 6;
  std::vector<MonomialIndex> indices;    // sorted by degree, then entries
  std::vector<MonomialAction> actions;   // aligned with indices
  // per action term, the flat index of its monomial (-1 for the empty one)
  std::vector<std::vector<int>> term_index;

  int index_of(const MonomialIndex& m) const;  // -1 when absent
};

// throws DegreeCapExceeded when a target degree exceeds n_max
MomentSystem build_moment_system(std::vector<MonomialIndex> targets,
                                 int n_max = 6);

struct MomentTrack {
  std::vector<double> times;
  std::vector<MonomialIndex> indices;
  std::vector<std::vector<double>> values;  // values[time][index]
  std::vector<double> gamma, theta;
};

// hierarchy driven by the control flow started at y0; initial moments are
// evaluated at the cluster vector x0
MomentTrack solve_hierarchy(const MomentSystem& sys, const ModelParams& params,
                            const ControlState& y0, const KingmanVector& x0,
                            const std::vector<double>& grid, double h = 1e-3);

// frozen environment: constant gamma and theta
MomentTrack solve_hierarchy_const(const MomentSystem& sys, double gamma_c,
                                  double theta_c, const KingmanVector& x0,
                                  const std::vector<double>& grid,
                                  double h = 1e-3);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;   // worst slack or quotient seen
  std::string witness;  // offending state when pass is false
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass = false;
};

using DriftFn =
    std::function<std::vector<double>(const ModelParams&, const ControlState&)>;

// Sampled checks of what the limit requires from the control flow:
//   (a) the drift vanishes on the frozen set where gamma = 0
//   (b) the drift points inward on every simplex face
//   (c) difference quotients of gamma, theta, beta_bar and the drift stay
//       below their explicit Lipschitz constants
//   (d) beta_bar is nonnegative and agrees with beta where gamma > 0
// `drift` substitutes the drift evaluation in (a) and (b); tests use it to
// inject faults and watch the right check fail.
AssumptionReport validate_control_assumptions(const ModelParams& params,
                                              int samples, std::uint64_t seed,
                                              const DriftFn& drift = {});

}  // namespace condensate
