#include "carousel/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "carousel/dirac.hpp"
#include "carousel/errors.hpp"
#include "carousel/rng.hpp"
#include "carousel/stats.hpp"
#include "doctest.h"

using namespace carousel;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
using cplx = std::complex<double>;

// Beta(1, s) quantile for reference samples.
double beta_1s_quantile(double u, double s) { return 1.0 - std::pow(1.0 - u, 1.0 / s); }

}  // namespace

TEST_CASE("affine parameter rows") {
  AffineParams sine = sine_affine_row(2.0);
  CHECK(sine.alpha1 * sine.alpha1 == doctest::Approx(2.0));  // variance 4/beta
  CHECK(sine.alpha2 * sine.alpha2 == doctest::Approx(2.0));
  CHECK(sine.gamma1 == 0.0);
  CHECK(sine.gamma2 == 0.0);

  AffineParams bes = bessel_affine_row(2.0, 0.5);
  CHECK(bes.alpha1 * bes.alpha1 == doctest::Approx(4.0));  // 8/beta
  CHECK(bes.alpha2 == 0.0);
  CHECK(bes.gamma1 == doctest::Approx(2.0 * 0.5 + 1.0 - 2.0));  // (2a+1) - 4/beta
  CHECK(bes.gamma2 == 0.0);

  AffineParams hp = hua_pickrell_affine_row(4.0, cplx(0.5, -0.25));
  CHECK(hp.alpha1 * hp.alpha1 == doctest::Approx(1.0));
  CHECK(hp.gamma1 == doctest::Approx(-0.5));   // -(4/beta) Re delta
  CHECK(hp.gamma2 == doctest::Approx(-0.25));  // (4/beta) Im delta

  // delta = 0 reduces the row to the bulk row
  AffineParams hp0 = hua_pickrell_affine_row(2.0, cplx(0.0, 0.0));
  CHECK(hp0.alpha1 == sine.alpha1);
  CHECK(hp0.gamma1 == 0.0);
  CHECK(hp0.gamma2 == 0.0);
}

TEST_CASE("affine path with zero noise and drift stays at i") {
  SdePath p = affine_bm_path({0.0, 0.0, 0.0, 0.0}, 1.0, GridSpec{.cells = 16, .substeps = 4}, 3);
  for (double v : p.y) CHECK(v == 1.0);
  for (double v : p.x) CHECK(v == 0.0);
  for (double v : p.f) CHECK(v == 0.5);
  CHECK(p.q == 0.0);
  CHECK(p.q_uncertainty == 0.0);
}

TEST_CASE("affine path replay reproduces the path") {
  GridSpec grid{.cells = 64, .substeps = 8};
  SdePath a = affine_bm_path(sine_affine_row(2.0), 5.0, grid, 12345, 1.0);
  SdePath b = affine_bm_path_replay(sine_affine_row(2.0), 5.0, grid, a.record, 1.0);
  REQUIRE(a.x.size() == b.x.size());
  for (size_t i = 0; i < a.x.size(); ++i) {
    CHECK(a.x[i] == b.x[i]);
    CHECK(a.y[i] == b.y[i]);
    CHECK(a.f[i] == b.f[i]);
  }
  CHECK(a.q == b.q);
}

TEST_CASE("noise record determinism and bridge refinement") {
  NoiseRecord a = make_noise_record(77, 0.01, 100, true);
  NoiseRecord b = make_noise_record(77, 0.01, 100, true);
  CHECK(a.db1 == b.db1);
  CHECK(a.db2 == b.db2);

  NoiseRecord fine = a.refined();
  CHECK(fine.dt == doctest::Approx(0.005));
  REQUIRE(fine.steps() == 200);
  auto coarse_cum = a.cumulative1();
  auto fine_cum = fine.cumulative1();
  for (size_t i = 0; i <= a.steps(); ++i)
    CHECK(fine_cum[2 * i] == doctest::Approx(coarse_cum[i]).epsilon(1e-12));
}

TEST_CASE("circular beta coefficient law") {
  CHECK(circular_beta_second_param(4, 0, 2.0) == doctest::Approx(3.0));

  VerblunskyCoefficients c = circular_beta_coeffs(6, 2.0, 99);
  CHECK(std::abs(std::abs(c.alpha.back()) - 1.0) < 1e-15);
  for (size_t k = 0; k + 1 < c.n(); ++k) CHECK(std::abs(c.alpha[k]) < 1.0);

  // E |alpha_0|^2 = 1/(1 + beta (n-1)/2)
  const size_t n = 4;
  const double beta = 2.0;
  double sum = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r)
    sum += std::norm(circular_beta_coeffs(n, beta, 100000 + r).alpha[0]);
  double mean = sum / reps;
  double target = 1.0 / (1.0 + 0.5 * beta * (n - 1));
  CHECK(std::abs(mean - target) < 3.0 * 0.25 / std::sqrt(double(reps)));
}

TEST_CASE("circular coefficients are rotationally invariant") {
  // |alpha_k|^2 distribution is unchanged when every angle is rotated.
  const int reps = 4000;
  std::vector<double> plain, rotated;
  for (int r = 0; r < reps; ++r) {
    plain.push_back(std::norm(circular_beta_coeffs(8, 2.0, 5000 + r).alpha[0]));
    cplx z = circular_beta_coeffs(8, 2.0, 90000 + r).alpha[0] * std::polar(1.0, 1.234);
    rotated.push_back(std::norm(z));
  }
  KsResult ks = ks_two_sample(plain, rotated, 0.01);
  CHECK(!ks.reject);
}

TEST_CASE("hua-pickrell coefficients at delta = 0 follow the circular law") {
  const size_t n = 8;
  const double beta = 2.0;
  const int reps = 10000;
  std::vector<double> sample, reference;
  for (int r = 0; r < reps; ++r) {
    DeformedVerblunsky g = hua_pickrell_coeffs(n, beta, cplx(0.0, 0.0), 40000 + r);
    sample.push_back(std::norm(g.gamma[0]));
    reference.push_back(beta_1s_quantile((r + 0.5) / reps, 0.5 * beta * (n - 1)));
  }
  KsResult ks = ks_two_sample(sample, reference, 0.01);
  CHECK(!ks.reject);

  // and a genuinely deformed sample is valid input for the pipeline
  DeformedVerblunsky g = hua_pickrell_coeffs(6, 2.0, cplx(0.8, 0.3), 7);
  CHECK(g.n() == 6);
  CHECK(std::abs(std::abs(g.gamma.back()) - 1.0) < 1e-12);
  DeformedVerblunsky gneg = hua_pickrell_coeffs(6, 2.0, cplx(-0.4, 0.1), 8);
  CHECK(std::abs(std::abs(gneg.gamma.back()) - 1.0) < 1e-12);
}

TEST_CASE("sine operator basics") {
  GridSpec grid;
  grid.cells = 512;
  grid.eps = 1e-4;
  DiracOperator lp = sine_beta_operator(2.0, grid, 41);
  CHECK(lp.endpoint_class() == EndpointClass::LimitPoint);
  DiracOperator lc = sine_beta_operator(4.0, grid, 41);
  CHECK(lc.endpoint_class() == EndpointClass::LimitCircle);
  CHECK(counting_function(lp, 0.0) == 0);

  // near-deterministic limit: at large beta the path freezes at i, so the
  // spectrum is close to the clock lattice anchored at the angle of the
  // (still Cauchy-distributed) boundary limit q
  DiracOperator frozen = sine_beta_operator(400.0, grid, 42);
  PointSample s = eigenvalues(frozen, -10.0, 10.0);
  REQUIRE(s.points.size() == 3);
  double anchor = reduce_mod_2pi(boundary_angle(frozen.bc1().point()));
  for (double p : s.points) {
    double offset = reduce_mod_2pi(p - anchor);
    double dist = std::min(offset, kTwoPi - offset);
    CHECK(dist < 0.45);
  }
  for (size_t i = 0; i + 1 < s.points.size(); ++i)
    CHECK(std::abs(s.points[i + 1] - s.points[i] - kTwoPi) < 0.7);
}

TEST_CASE("bessel operator and hard-edge oracle") {
  CHECK(hard_edge_m(0.7, -0.3, 2.0, 0.5) ==
        doctest::Approx(std::exp(-1.5 * 0.7 - std::sqrt(2.0) * (-0.3))));
  CHECK(hard_edge_s(0.7, -0.3, 2.0, 0.5) ==
        doctest::Approx(std::exp(0.5 * 0.7 + std::sqrt(2.0) * (-0.3))));

  GridSpec grid;
  BesselOperator bes = bessel_operator(2.0, 0.5, grid, 11);
  CHECK(bes.op.endpoint_class() == EndpointClass::LimitPoint);
  CHECK(bessel_operator(2.0, -0.5, grid, 11).op.endpoint_class() == EndpointClass::LimitCircle);

  // window wide enough for three positive points, from the oracle scale
  std::vector<double> oracle = hard_edge_sl_oracle(*bes.record, 2.0, 0.5, 3);
  double hi = 4.0 * std::sqrt(oracle[2]) * 1.3;

  // spectrum symmetry: spec = -spec
  PointSample pos = eigenvalues(bes.op, 1e-9, hi);
  PointSample neg = eigenvalues(bes.op, -hi, -1e-9);
  REQUIRE(pos.points.size() == neg.points.size());
  for (size_t i = 0; i < pos.points.size(); ++i)
    CHECK(std::abs(pos.points[i] + neg.points[neg.points.size() - 1 - i]) < 1e-6);

  // per-path identity against the Sturm-Liouville oracle on the same record
  REQUIRE(pos.points.size() >= 3);
  for (size_t i = 0; i < 3; ++i) {
    double lhs = std::pow(pos.points[i] / 4.0, 2);
    CHECK(std::abs(lhs - oracle[i]) < 5e-3 * oracle[i]);
  }

  // replay gives the identical operator
  BesselOperator again = bessel_operator_replay(2.0, 0.5, grid, bes.record);
  CHECK(again.op.path().values[100].y == bes.op.path().values[100].y);
}

TEST_CASE("hua-pickrell operator classification threshold") {
  GridSpec grid;
  grid.cells = 512;
  grid.eps = 1e-4;
  // limit circle iff Re delta + 1/2 < beta/4
  DiracOperator lc = hua_pickrell_operator(8.0, cplx(0.5, 0.2), grid, 5);  // 1.0 < 2.0
  CHECK(lc.endpoint_class() == EndpointClass::LimitCircle);
  DiracOperator lp = hua_pickrell_operator(2.0, cplx(0.5, 0.2), grid, 5);  // 1.0 >= 0.5
  CHECK(lp.endpoint_class() == EndpointClass::LimitPoint);
  // q exists and is finite
  CHECK(std::isfinite(lp.bc1().point().value()));
}

TEST_CASE("schrodinger operator") {
  GridSpec grid;
  grid.cells = 512;
  DiracOperator op = schrodinger_operator(3.0, grid, 21);
  CHECK(op.path().grid_end() == doctest::Approx(3.0));  // covers [0, nu)
  CHECK(op.path().grid.front() == 0.0);
  CHECK(op.endpoint_class() == EndpointClass::LimitCircle);
  PointSample s = eigenvalues(op, -4.0, 4.0);
  CHECK(!s.points.empty());
}

TEST_CASE("killip-stoiciu sampler") {
  CHECK(ks_diffusion_coefficient(4.0, 1.0) == doctest::Approx(1.0));
  CHECK(ks_diffusion_coefficient(2.0, 0.25) == doctest::Approx(2.0 / std::sqrt(0.5)));

  KsSample s = killip_stoiciu_sample(2.0, 0.0, 30.0, 65, 31);
  // lambda psi_lambda(1) >= 0 up to Euler-Maruyama slack
  for (size_t i = 0; i < s.lambda_mesh.size(); ++i)
    CHECK(s.lambda_mesh[i] * s.psi_at_one[i] > -1e-6);
  for (size_t i = 0; i + 1 < s.points.size(); ++i) CHECK(s.points[i] < s.points[i + 1]);
  for (double p : s.points) {
    CHECK(p >= 0.0);
    CHECK(p <= 30.0);
  }
  CHECK(s.max_coupling_violation < 0.05);

  // theta is uniform on [0, 2 pi) and independent of the noise seed stream
  std::vector<double> thetas, unif;
  for (int r = 0; r < 400; ++r) {
    thetas.push_back(killip_stoiciu_sample(2.0, 0.0, 1.0, 2, 600 + r).theta);
    unif.push_back(kTwoPi * (r + 0.5) / 400.0);
  }
  CHECK(!ks_two_sample(thetas, unif, 0.01).reject);
}

TEST_CASE("airy counting routes agree") {
  // below the ground state (2.338 at vanishing noise) the count is zero
  AiryCount low = airy_counting(1e9, 1.0, 12345);
  CHECK(low.count == 0);

  // dual-route integer agreement on shared noise
  Rng rng(5150);
  for (int trial = 0; trial < 12; ++trial) {
    double beta = 0.5 + 8.0 * rng.uniform();
    double lambda = -3.0 + 12.0 * rng.uniform();
    double horizon = std::max(10.0, lambda + 8.0);
    NoiseRecord rec = airy_noise(2.0 * horizon, 777000 + trial);
    AiryCount c = airy_counting(beta, lambda, rec);
    long r = airy_riccati_count(beta, lambda, rec);
    CHECK(c.count == r);
    CHECK(c.blowups >= c.count);
  }

  // a horizon that cuts into the oscillation zone is flagged
  NoiseRecord tiny = airy_noise(6.0, 99);
  CHECK_THROWS_AS(airy_counting(2.0, 9.0, tiny), HorizonTooShort);
}
