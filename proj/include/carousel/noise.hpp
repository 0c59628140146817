#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace carousel {

// Replayable Gaussian increment record on a uniform grid.  Paired solvers
// (Dirac vs Sturm-Liouville oracle, canonical system vs Riccati shooting)
// consume the same record so per-path identities can be tested.
struct NoiseRecord {
  uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> db1;
  std::vector<double> db2;  // empty for single-component records

  size_t steps() const { return db1.size(); }
  double horizon() const { return dt * double(steps()); }
  bool two_component() const { return !db2.empty(); }

  std::vector<double> cumulative1() const;
  std::vector<double> cumulative2() const;

  // Brownian-bridge midpoint refinement: halves dt, doubles the step count,
  // keeps all coarse partial sums.  Deterministic given the stored seed.
  NoiseRecord refined() const;
};

NoiseRecord make_noise_record(uint64_t seed, double dt, size_t steps, bool two_component);

std::string noise_record_to_json(const NoiseRecord& rec);
NoiseRecord noise_record_from_json(const std::string& text);
void save_noise_record(const NoiseRecord& rec, const std::string& path);
NoiseRecord load_noise_record(const std::string& path);

}  // namespace carousel
