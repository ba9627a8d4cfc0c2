#pragma once

// Fixed-seed invariant suites behind `pcshift verify <suite>`.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pcshift {

struct CheckResult {
  std::string name;
  bool passed = false;
  double deviation = 0.0;  ///< worst measured deviation (relative or absolute, see name)
  double tolerance = 0.0;
  std::size_t cases = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// identities, sampler, oracles, lowerbound.
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all"; unknown names throw ValidationError.
std::vector<SuiteReport> verify(std::string_view suite);

}  // namespace pcshift
