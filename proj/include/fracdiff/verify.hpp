#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracdiff {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Names accepted by run_verify, "all" included.
std::span<const std::string_view> verify_suite_names();

bool is_verify_suite(std::string_view name);

/// Runs one property suite (or all of them) at desk scale.
std::vector<CheckResult> run_verify_suite(std::string_view suite);

/// Prints a pass/fail table. Returns 0 if everything passed, 1 on any failure,
/// 2 for an unknown suite.
int run_verify(std::string_view suite, std::ostream& out);

}  // namespace fracdiff
