#include "carousel/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "carousel/ensembles.hpp"
#include "carousel/errors.hpp"
#include "carousel/rng.hpp"
#include "carousel/szego.hpp"
#include "doctest.h"

using namespace carousel;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Constant path at i with f = 1/2 on [0,1), eta0 = 0, eta1 = infinity.
// Spectrum is pi + 2 pi Z, ||tau^{-1}||_2^2 = 1/4.
DiracOperator clock_operator() {
  return DiracOperator::make(DrivingPath::constant({0.0, 1.0}, 0.5, 1.0, 4),
                             BoundaryCondition::from_point(BoundaryPoint::real(0.0)),
                             BoundaryCondition::from_point(BoundaryPoint::infinity()));
}

DiracOperator random_circular_op(uint64_t seed, size_t n = 8, double beta = 2.0) {
  return unitary_dirac_operator(circular_beta_coeffs(n, beta, seed));
}

}  // namespace

TEST_CASE("clock operator spectrum and norm") {
  DiracOperator op = clock_operator();
  CHECK(op.endpoint_class() == EndpointClass::LimitCircle);

  PointSample s = eigenvalues(op, -25.0, 25.0);
  std::vector<double> expect = {-7 * kPi, -5 * kPi, -3 * kPi, -kPi, kPi, 3 * kPi, 5 * kPi, 7 * kPi};
  REQUIRE(s.points.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i)
    CHECK(std::abs(s.points[i] - expect[i]) < 1e-10);

  CHECK(std::abs(hs_norm_squared(op) - 0.25) < 1e-10);
}

TEST_CASE("clock operator counting") {
  DiracOperator op = clock_operator();
  CHECK(counting_function(op, 0.0) == 0);
  CHECK(counting_function(op, 2 * kPi) == 1);
  CHECK(counting_function(op, kPi - 1e-12) == 0);
  CHECK(counting_function(op, kPi + 1e-12) == 1);
  CHECK(counting_function(op, 20.0) == 3);   // pi, 3pi, 5pi
  CHECK(counting_function(op, -2 * kPi) == -1);
}

TEST_CASE("phase function basics") {
  DiracOperator op = clock_operator();
  PhaseFunction still = phase_forward(op, 0.0);
  for (double a : still.angles) CHECK(a == doctest::Approx(op.bc0().phi));

  // gamma = 0 so the phase is phi0 + lambda t exactly
  PhaseFunction ph = phase_forward(op, 3.7);
  for (size_t i = 0; i < ph.times.size(); ++i)
    CHECK(ph.angles[i] == doctest::Approx(op.bc0().phi + 3.7 * ph.times[i]).epsilon(1e-13));
}

TEST_CASE("degenerate bulk path: constant center, eta0 = infinity, q = 0") {
  DiracOperator op = DiracOperator::make(DrivingPath::constant({0.0, 1.0}, 0.5, 1.0, 4),
                                         BoundaryCondition::from_point(BoundaryPoint::infinity()),
                                         BoundaryCondition::from_point(BoundaryPoint::real(0.0)));
  PointSample s = eigenvalues(op, -10.0, 10.0);
  std::vector<double> expect = {-3 * kPi, -kPi, kPi, 3 * kPi};
  REQUIRE(s.points.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(s.points[i] - expect[i]) < 1e-10);
}

TEST_CASE("parallel boundary conditions rejected") {
  CHECK_THROWS_AS(DiracOperator::make(DrivingPath::constant({0.0, 1.0}, 0.5, 1.0, 2),
                                      BoundaryCondition::from_angle(1.0),
                                      BoundaryCondition::from_angle(1.0)),
                  DegenerateBoundaryConditions);
}

TEST_CASE("phase monotone in t and lambda") {
  DiracOperator op = random_circular_op(21);
  PhaseFunction lo = phase_forward(op, 3.0);
  PhaseFunction hi = phase_forward(op, 4.5);
  for (size_t i = 1; i < lo.angles.size(); ++i) {
    CHECK(lo.angles[i] >= lo.angles[i - 1]);
    CHECK(hi.angles[i] > lo.angles[i]);
  }
  PhaseFunction neg = phase_forward(op, -2.0);
  for (size_t i = 1; i < neg.angles.size(); ++i) CHECK(neg.angles[i] <= neg.angles[i - 1]);
}

TEST_CASE("counting matches eigenvalue cardinality") {
  for (uint64_t seed : {31, 32, 33}) {
    DiracOperator op = random_circular_op(seed);
    double lam = 17.3;  // not an eigenvalue (generic)
    PointSample s = eigenvalues(op, 0.0, lam);
    long n = counting_function(op, lam);
    CHECK(n == long(s.points.size()));
  }
}

TEST_CASE("weight covariance: f -> c f scales the spectrum by 1/c") {
  VerblunskyCoefficients coeffs = circular_beta_coeffs(6, 2.0, 77);
  DiracOperator op = unitary_dirac_operator(coeffs);
  DrivingPath scaled = op.path();
  const double c = 2.5;
  for (double& f : scaled.weight) f *= c;
  DiracOperator op_scaled =
      DiracOperator::make_allowing_parallel(std::move(scaled), op.bc0(), op.bc1());

  PointSample base = eigenvalues(op, -20.0 * c, 20.0 * c);
  PointSample fast = eigenvalues(op_scaled, -20.0, 20.0);
  REQUIRE(!fast.points.empty());
  for (double p : fast.points) {
    bool found = false;
    for (double q : base.points)
      if (std::abs(q / c - p) < 1e-8) found = true;
    CHECK(found);
  }
}

TEST_CASE("forward and reverse spectra coincide") {
  for (uint64_t seed : {41, 42, 43, 44}) {
    DiracOperator op = random_circular_op(seed, 6);
    PointSample fwd = eigenvalues(op, -15.0, 15.0);
    PointSample rev = eigenvalues_reverse(op, -15.0, 15.0);
    REQUIRE(fwd.points.size() == rev.points.size());
    for (size_t i = 0; i < fwd.points.size(); ++i)
      CHECK(std::abs(fwd.points[i] - rev.points[i]) < 1e-8);
  }
}

TEST_CASE("reverse phase at lambda = 0 returns phi1") {
  DiracOperator op = random_circular_op(51);
  CHECK(phase_reverse(op, 0.0) == doctest::Approx(op.bc1().phi).epsilon(1e-13));
}

TEST_CASE("exact cell propagation agrees with half-plane integration") {
  for (uint64_t seed : {61, 62}) {
    DiracOperator op = random_circular_op(seed, 6);
    for (double lam : {-7.3, -1.1, 0.4, 2.9, 11.0}) {
      double disk = phase_forward(op, lam).terminal();
      double half = phase_forward_half_plane(op, lam);
      CHECK(std::abs(disk - half) < 1e-9);
    }
  }
}

TEST_CASE("coordinate invariance on smooth paths") {
  Rng rng(71);
  for (int trial = 0; trial < 3; ++trial) {
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
    for (double lam : {-6.0, -2.2, 1.7, 5.0, 9.4}) {
      double disk = phase_forward(op, lam).terminal();
      double half = phase_forward_half_plane(op, lam);
      CHECK(std::abs(disk - half) < 1e-9);
    }
  }
}

TEST_CASE("endpoint classification by quadrature") {
  DrivingPath p = DrivingPath::constant({0.0, 1.0}, 0.5, 1.0, 4);
  CHECK(classify_endpoint(p) == EndpointClass::LimitCircle);

  SolverConfig tiny;
  tiny.classification_ceiling = 0.1;
  CHECK(classify_endpoint(p, tiny) == EndpointClass::LimitPoint);

  SolverConfig edge;
  edge.classification_ceiling = 0.5;  // quadrature sits exactly at the ceiling
  edge.classification_rel_tol = 0.01;
  CHECK_THROWS_AS(classify_endpoint(p, edge), IndeterminateClassification);
}

TEST_CASE("winding guard") {
  DiracOperator op = clock_operator();
  SolverConfig cfg;
  cfg.max_winding = 2;
  CHECK_THROWS_AS(phase_forward(op, 1000.0, cfg), WindingGuardExceeded);
}

TEST_CASE("disk coordinates of constant paths") {
  DiracOperator op = clock_operator();
  DiskPath dp = to_disk_coordinates(op);
  for (const auto& g : dp.centers) CHECK(std::abs(g) < 1e-15);

  DiracOperator op2 = DiracOperator::make(DrivingPath::constant({0.0, 2.0}, 0.5, 1.0, 2),
                                          BoundaryCondition::from_point(BoundaryPoint::real(0.0)),
                                          BoundaryCondition::from_point(BoundaryPoint::infinity()));
  DiskPath dp2 = to_disk_coordinates(op2);
  for (const auto& g : dp2.centers)
    CHECK(std::abs(g - std::complex<double>(1.0 / 3.0, 0.0)) < 1e-15);
}
