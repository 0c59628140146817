#pragma once

#include <vector>

#include "carousel/dirac.hpp"

namespace carousel {

struct IntensityEstimate {
  double window_lo = 0.0, window_hi = 0.0;
  double mean_per_unit = 0.0;
  double standard_error = 0.0;
  size_t paths = 0;
};

// Mean and standard error of (points in window)/|window| over the samples.
IntensityEstimate intensity_estimate(const std::vector<PointSample>& samples, double lo,
                                     double hi);
IntensityEstimate intensity_from_counts(const std::vector<long>& counts, double lo, double hi);

struct KsResult {
  double statistic = 0.0;  // sup distance of empirical CDFs, in [0,1]
  double threshold = 0.0;  // c(alpha) sqrt((m+n)/(m n))
  bool reject = false;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic threshold.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

// Consecutive gaps of the points inside the window shrunk by `margin` on
// each side; windows clip the process, so edge points are excluded.
std::vector<double> gap_sample(const PointSample& sample, double margin = 0.10);
std::vector<double> gaps_of(const std::vector<double>& sorted_points, double lo, double hi,
                            double margin = 0.10);

}  // namespace carousel
