#pragma once

// End to end verification suite. Each check pins its own parameters and
// tolerances, prints one PASS/FAIL line, and never adjusts a threshold at
// run time; a failure is reported, not repaired.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace condensate {

struct AcceptanceOptions {
  std::string out_dir = "acceptance_out";
  std::uint64_t master_seed = 20260819;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;     // measured numbers and the pinned tolerance
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_pass = false;
};

// Runs every check in order, streaming one line per criterion to `log`,
// and writes data artifacts plus acceptance.json under options.out_dir.
AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                std::ostream& log);

}  // namespace condensate
