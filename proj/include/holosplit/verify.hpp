#pragma once

#include <string>
#include <vector>

namespace holosplit {

// One named invariant check with a measured detail string for the report.
struct VerifyCheck {
  std::string suite;
  std::string name;
  bool ok = false;
  std::string detail;
};

// Names of the built-in invariant suites, in run order.
std::vector<std::string> verify_suites();

// Runs the invariant suite(s): every module's core contracts exercised on a
// fixed seeded scenario. Empty filter runs all suites; an unknown name is an
// invalid-parameter error.
std::vector<VerifyCheck> run_verify(const std::string& suite = "");

}  // namespace holosplit
