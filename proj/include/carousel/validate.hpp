#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace carousel {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string measured;  // human-readable measured values
};

struct ValidationBudget {
  // The `small` budget divides path counts by 4 and moves statistical
  // alpha levels from 0.01 to 0.001 (wider acceptance bands).
  bool small = false;

  size_t paths(size_t full) const { return small ? std::max<size_t>(full / 4, 50) : full; }
  double alpha() const { return small ? 0.001 : 0.01; }
};

// Deterministic criteria: exact identities and dual-route agreements.
std::vector<CriterionResult> run_deterministic_suite(uint64_t seed, const ValidationBudget& budget);

// Statistical criteria: Monte Carlo intensities and distribution tests.
std::vector<CriterionResult> run_statistical_suite(uint64_t seed, const ValidationBudget& budget);

std::string format_report_csv(const std::vector<CriterionResult>& results);

}  // namespace carousel
