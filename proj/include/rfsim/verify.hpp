#pragma once

#include "rfsim/kernels.hpp"

#include <string>
#include <vector>

namespace rfsim {

struct SuiteResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::string preset_dir;
  Exec exec = Exec::Parallel;
};

/// Acceptance suites in criterion order.
const std::vector<std::string>& suite_names();

/// Runs one suite by name; "all" is handled by run_all. Unknown names throw
/// DomainError.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);
std::vector<SuiteResult> run_all(const VerifyOptions& opts);

}  // namespace rfsim
