#pragma once

// Structural invariant suite run by `memchan validate`.

#include <optional>
#include <string>
#include <vector>

namespace memchan::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  /// Replaces eta(tau) of the test environment by a constant (fault
  /// injection; eta > 1 is not a valid amplitude damping parameter).
  std::optional<double> fault_eta;
};

std::vector<CheckResult> run_validation(const ValidateOptions& options = {});

}  // namespace memchan::cli
