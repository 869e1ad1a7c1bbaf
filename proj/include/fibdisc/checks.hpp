#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fibdisc {

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Outcome of one invariant suite together with the constants it measured.
struct SuiteResult {
  std::string suite;
  std::vector<CheckItem> items;
  std::vector<std::pair<std::string, double>> constants;

  bool passed() const;
};

/// Suites in execution order: lattice, splines, discrepancy, study.
const std::vector<std::string>& suite_names();

/// Runs one suite; every random input is drawn from streams keyed by seed.
/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

/// "<suite> PASS|FAIL <passed>/<total> name=value ... [failed: a,b]"
std::string summary_line(const SuiteResult& result);

}  // namespace fibdisc
