#include "carousel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carousel/errors.hpp"

namespace carousel {

IntensityEstimate intensity_estimate(const std::vector<PointSample>& samples, double lo,
                                     double hi) {
  std::vector<long> counts;
  counts.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.window_lo > lo || s.window_hi < hi)
      throw WindowMismatch("intensity_estimate: sample window does not cover the request");
    long c = 0;
    for (double p : s.points)
      if (p > lo && p <= hi) ++c;
    counts.push_back(c);
  }
  return intensity_from_counts(counts, lo, hi);
}

IntensityEstimate intensity_from_counts(const std::vector<long>& counts, double lo, double hi) {
  if (counts.size() < 2)
    throw WindowMismatch("intensity estimate needs at least two paths for a standard error");
  if (!(hi > lo)) throw std::invalid_argument("intensity: invalid window");
  double len = hi - lo;
  double mean = 0.0;
  for (long c : counts) mean += double(c);
  mean /= double(counts.size());
  double var = 0.0;
  for (long c : counts) {
    double d = double(c) - mean;
    var += d * d;
  }
  var /= double(counts.size() - 1);
  IntensityEstimate out;
  out.window_lo = lo;
  out.window_hi = hi;
  out.paths = counts.size();
  out.mean_per_unit = mean / len;
  out.standard_error = std::sqrt(var / double(counts.size())) / len;
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  const double na = double(a.size()), nb = double(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  KsResult out;
  out.statistic = d;
  double c_alpha = std::sqrt(-0.5 * std::log(0.5 * alpha));
  out.threshold = c_alpha * std::sqrt((na + nb) / (na * nb));
  out.reject = out.statistic > out.threshold;
  return out;
}

std::vector<double> gaps_of(const std::vector<double>& sorted_points, double lo, double hi,
                            double margin) {
  double trim = margin * (hi - lo);
  double a = lo + trim, b = hi - trim;
  std::vector<double> inside;
  for (double p : sorted_points)
    if (p >= a && p <= b) inside.push_back(p);
  std::vector<double> gaps;
  for (size_t i = 0; i + 1 < inside.size(); ++i) gaps.push_back(inside[i + 1] - inside[i]);
  return gaps;
}

std::vector<double> gap_sample(const PointSample& sample, double margin) {
  return gaps_of(sample.points, sample.window_lo, sample.window_hi, margin);
}

}  // namespace carousel
