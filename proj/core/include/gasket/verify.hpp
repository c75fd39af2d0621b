#pragma once

#include <string>
#include <vector>

namespace gasket::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> detail;
};

struct Options {
  int threads = 4;
};

inline constexpr int kCriterionCount = 12;

CheckResult run_criterion(int id, const Options& opt);
std::vector<CheckResult> run_all(const Options& opt);

// Fast exact-identity subset (energy equality, integration by parts, Green
// nesting, appendix fixed points, duality closed forms).
std::vector<CheckResult> run_exact_suite(const Options& opt);

std::string format_result_line(const CheckResult& r);

} // namespace gasket::verify
