#include "carousel/stats.hpp"

#include <cmath>

#include "carousel/ensembles.hpp"
#include "carousel/errors.hpp"
#include "doctest.h"

using namespace carousel;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

PointSample lattice_sample(double lo, double hi) {
  PointSample s;
  s.window_lo = lo;
  s.window_hi = hi;
  for (long k = -100; k <= 100; ++k) {
    double p = kPi + kTwoPi * k;
    if (p > lo && p <= hi) s.points.push_back(p);
  }
  std::sort(s.points.begin(), s.points.end());
  return s;
}

}  // namespace

TEST_CASE("intensity of the deterministic lattice") {
  std::vector<PointSample> samples(3, lattice_sample(-20.0, 20.0));
  IntensityEstimate est = intensity_estimate(samples, -20.0, 20.0);
  CHECK(est.mean_per_unit == doctest::Approx(6.0 / 40.0));  // six points in the window
  CHECK(est.standard_error == 0.0);
  CHECK(est.paths == 3);
}

TEST_CASE("intensity guards") {
  std::vector<PointSample> one(1, lattice_sample(-20.0, 20.0));
  CHECK_THROWS_AS(intensity_estimate(one, -20.0, 20.0), WindowMismatch);

  std::vector<PointSample> narrow(2, lattice_sample(-5.0, 5.0));
  CHECK_THROWS_AS(intensity_estimate(narrow, -20.0, 20.0), WindowMismatch);
}

TEST_CASE("intensity of disjoint equal windows pools") {
  // mean over [a,c] equals the average of the means over [a,b] and [b,c]
  std::vector<PointSample> samples;
  for (int k = 0; k < 4; ++k) samples.push_back(lattice_sample(0.0, 40.0));
  IntensityEstimate left = intensity_estimate(samples, 0.0, 20.0);
  IntensityEstimate right = intensity_estimate(samples, 20.0, 40.0);
  IntensityEstimate full = intensity_estimate(samples, 0.0, 40.0);
  CHECK(full.mean_per_unit ==
        doctest::Approx(0.5 * (left.mean_per_unit + right.mean_per_unit)));
}

TEST_CASE("two-sample ks statistic") {
  std::vector<double> a = {0.1, 0.5, 0.9, 1.4, 2.2};
  CHECK(ks_two_sample(a, a).statistic == 0.0);

  std::vector<double> lowb, highb;
  for (int i = 0; i < 25; ++i) {
    lowb.push_back(0.01 * i);
    highb.push_back(5.0 + 0.01 * i);
  }
  KsResult disjoint = ks_two_sample(lowb, highb);
  CHECK(disjoint.statistic == doctest::Approx(1.0));
  CHECK(disjoint.reject);

  // symmetry and range
  std::vector<double> b = {0.3, 0.4, 1.1, 3.0};
  KsResult ab = ks_two_sample(a, b), ba = ks_two_sample(b, a);
  CHECK(ab.statistic == doctest::Approx(ba.statistic));
  CHECK(ab.statistic >= 0.0);
  CHECK(ab.statistic <= 1.0);

  CHECK_THROWS_AS(ks_two_sample({}, a), std::invalid_argument);
}

TEST_CASE("gap samples exclude the window margins") {
  PointSample s;
  s.window_lo = 0.0;
  s.window_hi = 10.0;
  s.points = {0.5, 1.5, 3.0, 5.0, 8.0, 9.7};
  std::vector<double> gaps = gap_sample(s);  // margins [1, 9]
  REQUIRE(gaps.size() == 3);                 // 1.5, 3, 5, 8 -> three gaps
  CHECK(gaps[0] == doctest::Approx(1.5));
  CHECK(gaps[1] == doctest::Approx(2.0));
  CHECK(gaps[2] == doctest::Approx(3.0));
}

TEST_CASE("ks self-consistency on bulk gap samples") {
  // Scaled-down rendition of the self-consistency experiment (the full
  // version runs two independent 500-gap samples twenty times); a coarse
  // grid is plenty for gap statistics.
  GridSpec grid;
  grid.cells = 512;
  grid.eps = 1e-4;
  auto gap_pool = [&](uint64_t base) {
    std::vector<double> gaps;
    for (int p = 0; gaps.size() < 250 && p < 120; ++p) {
      PointSample s = eigenvalues(sine_beta_operator(2.0, grid, base + p), 0.0, 40.0);
      for (double g : gaps_of(s.points, 0.0, 40.0)) gaps.push_back(g);
    }
    return gaps;
  };
  int rejections = 0;
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> a = gap_pool(220000 + 1000 * rep);
    std::vector<double> b = gap_pool(330000 + 1000 * rep);
    if (ks_two_sample(a, b, 0.01).reject) ++rejections;
  }
  CHECK(rejections == 0);
}
