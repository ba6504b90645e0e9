#pragma once

#include <iosfwd>
#include <string>

#include "ftcy/field.hpp"

namespace ftcy {

// Batch identity/property suite behind the `verify` command.  Every check is
// named and cites the mathematical statement it probes; unknown check names
// fail closed.

struct SuiteConfig {
  int n = 3;
  std::vector<int> axes = {1};
  std::vector<int> grid = {64};
  std::uint64_t seed = 20240801;
  double tol = 1e-10;
  std::vector<std::string> checks;  // empty selects the full set
  std::string out_dir;              // empty: stdout only
};

struct CheckResult {
  std::string name;
  std::string anchor;  // the identity under test, stated in words
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<CheckResult> checks;
  std::string stamp;  // environment stamp, excluded from determinism

  bool all_pass() const;
};

std::vector<std::string> suite_check_names();

SuiteReport run_suite(const SuiteConfig& cfg);

void write_report(const SuiteReport& rep, std::ostream& os);

}  // namespace ftcy
