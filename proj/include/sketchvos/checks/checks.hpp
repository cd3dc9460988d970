#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sketchvos::checks {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// metrics, grads, attention, memory.
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Unknown names raise ConfigError.
/// A check that throws is reported as failed with the exception text.
std::vector<CheckResult> run_suite(std::string_view name);

std::vector<CheckResult> metrics_suite();
std::vector<CheckResult> grads_suite();
std::vector<CheckResult> attention_suite();
std::vector<CheckResult> memory_suite();

/// "PASS suite/name: detail" or "FAIL ...".
std::string format(const CheckResult& r);

}  // namespace sketchvos::checks
