#pragma once

// Seeded self-check suite behind the `verify` command.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sifrian {

struct CheckResult {
  std::string name;
  /// Worst measured error over the check's samples.
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Informational checks are printed but do not affect the exit status.
  bool gating = true;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Replaces every check's tolerance when set.
  std::optional<double> tolerance;
  /// Test hook: negate the MK bias part before the descent check.
  bool flip_mk_bias_sign = false;
  std::size_t samples = 20;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opt);

/// One line per check; returns true iff every gating check passed.
bool print_report(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace sifrian
