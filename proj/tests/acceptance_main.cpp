// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Thread count via GASKET_ACCEPT_THREADS (default 4).

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "gasket/verify.hpp"

int main() {
  gasket::verify::Options opt;
  opt.threads = static_cast<int>(std::thread::hardware_concurrency());
  if (opt.threads < 1) opt.threads = 4;
  if (const char* env = std::getenv("GASKET_ACCEPT_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) opt.threads = t;
  }

  int failures = 0;
  for (int id = 1; id <= gasket::verify::kCriterionCount; ++id) {
    gasket::verify::CheckResult r;
    try {
      r = gasket::verify::run_criterion(id, opt);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion raised: " + std::string(e.what());
      r.pass = false;
    }
    std::printf("%s\n", gasket::verify::format_result_line(r).c_str());
    for (const auto& line : r.detail) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  if (failures > 0)
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  else
    std::printf("acceptance: all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
