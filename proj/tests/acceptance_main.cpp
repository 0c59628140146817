// Acceptance suite: runs every validation criterion at full budget and
// prints one pass/fail line per criterion.  Exit status is the number of
// failures.
#include <chrono>
#include <cstdio>
#include <exception>

#include "carousel/validate.hpp"

int main() {
  using namespace carousel;
  const uint64_t seed = 20240901;
  ValidationBudget budget;
  int failures = 0;
  auto report = [&](const std::vector<CriterionResult>& results) {
    for (const auto& r : results) {
      std::printf("%s  %-34s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                  r.measured.c_str());
      std::fflush(stdout);
      if (!r.passed) ++failures;
    }
  };
  auto t0 = std::chrono::steady_clock::now();
  try {
    report(run_deterministic_suite(seed, budget));
    report(run_statistical_suite(seed, budget));
  } catch (const std::exception& e) {
    std::printf("FAIL  suite aborted: %s\n", e.what());
    return 99;
  }
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  std::printf("%d failure(s), %lld s\n", failures, (long long)secs);
  return failures;
}
