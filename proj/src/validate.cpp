#include "carousel/validate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "carousel/dirac.hpp"
#include "carousel/ensembles.hpp"
#include "carousel/errors.hpp"
#include "carousel/rng.hpp"
#include "carousel/stats.hpp"
#include "carousel/szego.hpp"

namespace carousel {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double circ_dist(double a, double b) {
  double d = reduce_mod_2pi(a - b);
  return std::min(d, kTwoPi - d);
}

// One-sample Kolmogorov-Smirnov distance against a CDF.
template <typename Cdf>
double ks_one_sample(std::vector<double> sample, const Cdf& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

CriterionResult unitary_round_trip(uint64_t seed) {
  double worst = 0.0;
  for (size_t n : {1, 2, 4, 8}) {
    for (uint64_t rep = 0; rep < 20; ++rep) {
      VerblunskyCoefficients coeffs =
          circular_beta_coeffs(n, 2.0, splitmix64(seed ^ (1000 * n + rep)));
      DiracOperator op = unitary_dirac_operator(coeffs);
      PointSample s = eigenvalues(op, -kPi * double(n), kPi * double(n));
      EigenAngles oracle = eigen_angles_oracle(coeffs);
      if (s.points.size() != n)
        return {"unitary round trip", false, "point count mismatch at n=" + std::to_string(n)};
      std::vector<double> scaled;
      for (double p : s.points) scaled.push_back(p / double(n));
      std::sort(scaled.begin(), scaled.end());
      for (size_t i = 0; i < n; ++i)
        worst = std::max(worst, circ_dist(scaled[i], oracle.angles[i]));
    }
  }
  return {"unitary round trip", worst <= 1e-8, "max angle error " + fmt(worst)};
}

CriterionResult clock_operator() {
  DiracOperator op = DiracOperator::make(
      DrivingPath::constant({0.0, 1.0}, 0.5, 1.0, 4),
      BoundaryCondition::from_point(BoundaryPoint::real(0.0)),
      BoundaryCondition::from_point(BoundaryPoint::infinity()));
  PointSample s = eigenvalues(op, -25.0, 25.0);
  std::vector<double> expect = {-7 * kPi, -5 * kPi, -3 * kPi, -kPi, kPi, 3 * kPi, 5 * kPi, 7 * kPi};
  double worst = (s.points.size() == expect.size()) ? 0.0 : 1.0;
  if (s.points.size() == expect.size())
    for (size_t i = 0; i < expect.size(); ++i)
      worst = std::max(worst, std::abs(s.points[i] - expect[i]));
  double hs_err = std::abs(hs_norm_squared(op) - 0.25);
  bool pass = worst <= 1e-10 && hs_err <= 1e-10;
  return {"clock operator", pass,
          "max eigenvalue error " + fmt(worst) + ", |hs - 1/4| " + fmt(hs_err)};
}

CriterionResult forward_reverse_duality(uint64_t seed) {
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    VerblunskyCoefficients coeffs = circular_beta_coeffs(8, 2.0, splitmix64(seed ^ (40000 + rep)));
    DiracOperator op = unitary_dirac_operator(coeffs);
    PointSample fwd = eigenvalues(op, -15.0, 15.0);
    PointSample rev = eigenvalues_reverse(op, -15.0, 15.0);
    if (fwd.points.size() != rev.points.size())
      return {"forward/reverse duality", false,
              "cardinality mismatch at rep " + std::to_string(rep)};
    for (size_t i = 0; i < fwd.points.size(); ++i)
      worst = std::max(worst, std::abs(fwd.points[i] - rev.points[i]));
  }
  return {"forward/reverse duality", worst <= 1e-8, "max eigenvalue difference " + fmt(worst)};
}

CriterionResult coordinate_invariance(uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0xC0DE));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const size_t m = 24;
    DrivingPath path;
    path.interpolation = Interpolation::LinearInLogY;
    path.grid.resize(m + 1);
    double x = 0.0, logy = 0.0;
    for (size_t i = 0; i <= m; ++i) {
      path.grid[i] = double(i) / double(m);
      if (i < m) {
        path.values.push_back({x, std::exp(logy)});
        x += 0.4 * (rng.uniform() - 0.5);
        logy = std::clamp(logy + 0.5 * (rng.uniform() - 0.5), -0.7, 0.7);
      }
    }
    path.weight.assign(m, 0.5);
    path.horizon = 1.0;
    DiracOperator op = DiracOperator::make(std::move(path), BoundaryCondition::from_angle(0.6),
                                           BoundaryCondition::from_angle(4.0));
    for (int j = 0; j < 10; ++j) {
      double lam = -10.0 + 20.0 * rng.uniform();
      double disk = phase_forward(op, lam).terminal();
      double half = phase_forward_half_plane(op, lam);
      worst = std::max(worst, std::abs(disk - half));
    }
  }
  return {"coordinate invariance", worst <= 1e-9, "max phase difference " + fmt(worst)};
}

CriterionResult sine_intensity(uint64_t seed, const ValidationBudget& budget) {
  const size_t paths = budget.paths(2000);
  const double target = 20.0 / kTwoPi;
  bool pass = true;
  std::string measured;
  for (double beta : {1.0, 2.0, 4.0}) {
    std::vector<long> counts;
    counts.reserve(paths);
    for (size_t p = 0; p < paths; ++p) {
      DiracOperator op =
          sine_beta_operator(beta, GridSpec{}, splitmix64(seed ^ (uint64_t(beta * 16) << 24) ^ p));
      counts.push_back(counting_function(op, 20.0));
    }
    IntensityEstimate est = intensity_from_counts(counts, 0.0, 20.0);
    double mean_count = est.mean_per_unit * 20.0;
    double se_count = est.standard_error * 20.0;
    double zscore = (mean_count - target) / se_count;
    if (std::abs(zscore) > 3.0) pass = false;
    measured += "beta " + fmt(beta) + ": mean " + fmt(mean_count) + " (z " + fmt(zscore) + "); ";
  }
  return {"sine intensity 1/(2pi)", pass, measured};
}

CriterionResult finite_to_limit(uint64_t seed, const ValidationBudget& budget) {
  const size_t paths = budget.paths(500);
  std::vector<double> finite_gaps, sine_gaps;
  for (size_t p = 0; p < paths; ++p) {
    DiracOperator op =
        unitary_dirac_operator(circular_beta_coeffs(64, 2.0, splitmix64(seed ^ (0x6A00 + p))));
    PointSample s = eigenvalues(op, -20.0, 20.0);
    for (double g : gaps_of(s.points, -20.0, 20.0)) finite_gaps.push_back(g);
  }
  for (size_t p = 0; p < paths; ++p) {
    DiracOperator op = sine_beta_operator(2.0, GridSpec{}, splitmix64(seed ^ (0x51E0 + p)));
    PointSample s = eigenvalues(op, -20.0, 20.0);
    for (double g : gaps_of(s.points, -20.0, 20.0)) sine_gaps.push_back(g);
  }
  KsResult ks = ks_two_sample(finite_gaps, sine_gaps, budget.alpha());
  return {"finite-to-limit gap statistics", !ks.reject,
          "ks " + fmt(ks.statistic) + " vs threshold " + fmt(ks.threshold) + " (" +
              std::to_string(finite_gaps.size()) + "/" + std::to_string(sine_gaps.size()) +
              " gaps)"};
}

CriterionResult hard_edge_identity(uint64_t seed) {
  const double beta = 2.0, a = 0.5;
  GridSpec grid;
  BesselOperator bes = bessel_operator(beta, a, grid, splitmix64(seed ^ 0xBE55E1));

  auto max_rel = [&](const BesselOperator& b, size_t nodes) {
    std::vector<double> oracle = hard_edge_sl_oracle(*b.record, beta, a, 3, nodes);
    double hi = 4.0 * std::sqrt(oracle[2]) * 1.3;
    PointSample s = eigenvalues(b.op, 1e-9, hi);
    if (s.points.size() < 3) return 1.0;
    double worst = 0.0;
    for (size_t i = 0; i < 3; ++i) {
      double lhs = std::pow(s.points[i] / 4.0, 2);
      worst = std::max(worst, std::abs(lhs - oracle[i]) / oracle[i]);
    }
    return worst;
  };

  double err_default = max_rel(bes, 800);

  GridSpec fine = grid;
  fine.cells = 2 * grid.cells;
  auto refined = std::make_shared<NoiseRecord>(bes.record->refined());
  BesselOperator bes_fine = bessel_operator_replay(beta, a, fine, refined);
  double err_fine = max_rel(bes_fine, 1600);

  bool pass = err_default <= 5e-3 && (err_fine <= err_default || err_fine <= 1e-3);
  return {"hard-edge per-path identity", pass,
          "rel error " + fmt(err_default) + " default, " + fmt(err_fine) + " refined"};
}

CriterionResult hua_pickrell_reduction(uint64_t seed, const ValidationBudget& budget) {
  const size_t n = 8;
  const double beta = 2.0;
  const size_t draws = budget.paths(10000);
  std::vector<double> sample;
  sample.reserve(draws);
  for (size_t r = 0; r < draws; ++r)
    sample.push_back(std::norm(
        hua_pickrell_coeffs(n, beta, {0.0, 0.0}, splitmix64(seed ^ (0x4B0000 + r))).gamma[0]));
  // |gamma_0|^2 ~ Beta(1, beta (n-1)/2) = Beta(1, 7) at these parameters
  double s_par = 0.5 * beta * double(n - 1);
  double d = ks_one_sample(sample, [&](double x) { return 1.0 - std::pow(1.0 - x, s_par); });
  double threshold = std::sqrt(-0.5 * std::log(0.5 * budget.alpha())) / std::sqrt(double(draws));
  return {"hua-pickrell reduction at delta=0", d <= threshold,
          "ks " + fmt(d) + " vs threshold " + fmt(threshold)};
}

CriterionResult airy_dual_count(uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0xA1BF));
  int agree = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    double beta = 0.5 + 8.0 * rng.uniform();
    double lambda = -3.0 + 12.0 * rng.uniform();
    double horizon = std::max(10.0, lambda + 8.0);
    NoiseRecord rec = airy_noise(2.0 * horizon, splitmix64(seed ^ (0xA1B00 + trial)));
    AiryCount c = airy_counting(beta, lambda, rec);
    long r = airy_riccati_count(beta, lambda, rec);
    if (c.count == r) ++agree;
  }
  return {"airy dual count", agree == trials,
          std::to_string(agree) + "/" + std::to_string(trials) + " triples agree"};
}

CriterionResult ks_vs_sine(uint64_t seed, const ValidationBudget& budget) {
  const size_t paths = budget.paths(500);
  bool pass = true;
  std::string measured;
  for (double beta : {1.0, 2.0}) {
    std::vector<double> ks_gaps, sine_gaps;
    for (size_t p = 0; p < paths; ++p) {
      KsSample s = killip_stoiciu_sample(beta, 0.0, 40.0, 129,
                                         splitmix64(seed ^ (uint64_t(beta * 4) << 32) ^ p));
      for (double g : gaps_of(s.points, 0.0, 40.0)) ks_gaps.push_back(g);
    }
    for (size_t p = 0; p < paths; ++p) {
      DiracOperator op = sine_beta_operator(
          beta, GridSpec{}, splitmix64(seed ^ (uint64_t(beta * 8) << 36) ^ (0xFACE + p)));
      PointSample s = eigenvalues(op, -40.0, 0.0);
      std::vector<double> neg;
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) neg.push_back(-*it);
      for (double g : gaps_of(neg, 0.0, 40.0)) sine_gaps.push_back(g);
    }
    KsResult ks = ks_two_sample(ks_gaps, sine_gaps, budget.alpha());
    if (ks.reject) pass = false;
    measured +=
        "beta " + fmt(beta) + ": ks " + fmt(ks.statistic) + " vs " + fmt(ks.threshold) + "; ";
  }
  return {"killip-stoiciu vs sine gaps", pass, measured};
}

}  // namespace

std::vector<CriterionResult> run_deterministic_suite(uint64_t seed, const ValidationBudget&) {
  std::vector<CriterionResult> out;
  out.push_back(unitary_round_trip(seed));
  out.push_back(clock_operator());
  out.push_back(forward_reverse_duality(seed));
  out.push_back(coordinate_invariance(seed));
  out.push_back(hard_edge_identity(seed));
  out.push_back(airy_dual_count(seed));
  return out;
}

std::vector<CriterionResult> run_statistical_suite(uint64_t seed, const ValidationBudget& budget) {
  std::vector<CriterionResult> out;
  out.push_back(sine_intensity(seed, budget));
  out.push_back(finite_to_limit(seed, budget));
  out.push_back(hua_pickrell_reduction(seed, budget));
  out.push_back(ks_vs_sine(seed, budget));
  return out;
}

std::string format_report_csv(const std::vector<CriterionResult>& results) {
  std::string out = "criterion,pass,measured\n";
  for (const auto& r : results) {
    std::string quoted = r.measured;
    for (char& c : quoted)
      if (c == ',') c = ';';
    out += r.name + "," + (r.passed ? "1" : "0") + "," + quoted + "\n";
  }
  return out;
}

}  // namespace carousel
