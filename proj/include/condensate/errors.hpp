#pragma once

#include <stdexcept>
#include <string>

namespace condensate {

// Error taxonomy shared by every module. All errors derive from
// std::runtime_error so callers can catch broadly; the CLI maps
// ConfigError to exit code 1 and any other failure to exit code 3.

// malformed user input: bad rate tables, impossible sizes, unknown keys
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// an operation that divides by gamma(y) was called at a state with gamma = 0
struct DegenerateGamma : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a rate evaluation came out negative or otherwise unusable
struct ZeroRate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a certified inequality failed on a concrete configuration
struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// an initial condition that cannot hold the requested particle number
struct InfeasibleInitial : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// the jump chain has total rate zero, so no further event can occur
struct Frozen : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// an integrator step left the state space by more than the clamp budget,
// or step halving failed to converge
struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// two series were compared on different time grids
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a requested moment closure needs monomials above the supported degree
struct DegreeCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace condensate
