#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "carousel/dirac.hpp"
#include "carousel/noise.hpp"
#include "carousel/szego.hpp"

namespace carousel {

// Ito parameter row of the affine SDE
//   dy = (gamma1 dt + alpha1 dB1) y,  dx = (gamma2 dt + alpha2 dB2) y.
struct AffineParams {
  double alpha1 = 0.0, alpha2 = 0.0, gamma1 = 0.0, gamma2 = 0.0;

  // Exponential decay rate of y (exponent drift is gamma1 - alpha1^2/2).
  double decay_rate() const { return 0.5 * alpha1 * alpha1 - gamma1; }
};

AffineParams sine_affine_row(double beta);
AffineParams bessel_affine_row(double beta, double a);
AffineParams hua_pickrell_affine_row(double beta, std::complex<double> delta);

struct GridSpec {
  size_t cells = 1024;
  size_t substeps = 16;   // Ito sub-grid per cell
  double eps = 1e-5;      // truncation distance from the singular endpoint
  double refine_factor = 4.0;
  // Per-path cutoff: cells beyond the first with y outside
  // [y_floor, 1/y_floor] are dropped.  Past that scale the phase pinch falls
  // toward double rounding and the grid carries no further spectral
  // information.
  double y_floor = 1e-11;
};

// Sampled affine path in the driving clock, the boundary limit estimate q,
// and the replayable noise record.  Each cell carries the representative
// (x, y, f) obtained by averaging R over the sub-grid and decomposing the
// average back through its unique (x, y, f) representation; for a constant
// path this is the path itself.
struct SdePath {
  std::vector<double> s;        // cell boundary times, size cells+1
  std::vector<double> x, y, f;  // cell representatives, size cells
  double x_end = 0.0, y_end = 1.0;  // exact values at s.back()
  double q = 0.0;
  double q_uncertainty = 0.0;
  std::shared_ptr<const NoiseRecord> record;
};

// y is simulated exactly at grid points as the exponential of its Gaussian
// exponent; x by left-point Ito sums on the sub-grid.  When (alpha2, gamma2)
// are nonzero and y decays, the simulation continues past the horizon until
// the tail envelope drops below 1e-8 of the accumulated |x|, which gives q.
// time_rate selects the clock the cell averages are taken in: 0 keeps the
// driving clock, 1 is the logarithmic time change t = 1 - e^{-s}.
SdePath affine_bm_path(const AffineParams& params, double horizon, const GridSpec& grid,
                       uint64_t seed, double time_rate = 0.0);
SdePath affine_bm_path_replay(const AffineParams& params, double horizon, const GridSpec& grid,
                              std::shared_ptr<const NoiseRecord> record, double time_rate = 0.0);

// Killip-Nenciu coefficient law: alpha_k rotationally invariant with
// |alpha_k|^2 ~ Beta(1, beta (n-k-1)/2), |alpha_{n-1}| = 1.
VerblunskyCoefficients circular_beta_coeffs(size_t n, double beta, uint64_t seed);
double circular_beta_second_param(size_t n, size_t k, double beta);

// Hua-Pickrell deformed coefficient law, sampled by rejection with the
// delta = 0 law as proposal and a per-radius-shell envelope of
// |(1-z)^{conj delta}|^2.
DeformedVerblunsky hua_pickrell_coeffs(size_t n, double beta, std::complex<double> delta,
                                       uint64_t seed);

DiracOperator sine_beta_operator(double beta, const GridSpec& grid, uint64_t seed);
DiracOperator hua_pickrell_operator(double beta, std::complex<double> delta, const GridSpec& grid,
                                    uint64_t seed);
DiracOperator schrodinger_operator(double nu, const GridSpec& grid, uint64_t seed);

struct BesselOperator {
  DiracOperator op;
  std::shared_ptr<const NoiseRecord> record;  // B over [0, 2 log(1/eps)]
  double beta = 0.0, a = 0.0;
};
BesselOperator bessel_operator(double beta, double a, const GridSpec& grid, uint64_t seed);
BesselOperator bessel_operator_replay(double beta, double a, const GridSpec& grid,
                                      std::shared_ptr<const NoiseRecord> record);

// Weight and derivative profile of the hard-edge Sturm-Liouville operator.
double hard_edge_m(double x, double b_at_x, double beta, double a);
double hard_edge_s(double x, double b_at_x, double beta, double a);

// Lowest k eigenvalues of the hard-edge Sturm-Liouville operator built from
// the same Brownian record, via a dense symmetric discretization of the
// inverse kernel K(x,y) = int_0^{x^y} s against m(y) dy.
std::vector<double> hard_edge_sl_oracle(const NoiseRecord& record, double beta, double a,
                                        size_t k, size_t quad_nodes = 800);

double ks_diffusion_coefficient(double beta, double t);  // 2 / sqrt(beta t)

struct KsConfig {
  double eps = 5e-5;        // initial distance from the singular time 0
  double log_step = 0.002;  // geometric grid ratio - 1
  // Point positions converge first order in eps (shift ~ lambda eps per
  // halving), and crossings where psi grazes a level are ill-conditioned by
  // nature, so the stabilization tolerance is loose; it still catches an eps
  // that is off by orders of magnitude.
  double set_tol = 0.25;
  int levels = 3;  // eps halvings
  double coupling_slack = 0.05;
};

struct KsSample {
  std::vector<double> lambda_mesh;
  std::vector<double> psi_at_one;  // terminal values on the mesh
  double theta = 0.0;              // uniform angle, independent of the noise
  std::vector<double> points;      // {lambda : psi_lambda(1) in theta + 2 pi Z}
  double max_coupling_violation = 0.0;
  std::vector<std::vector<double>> level_points;  // per eps level, for diagnostics
};

KsSample killip_stoiciu_sample(double beta, double lo, double hi, size_t mesh, uint64_t seed,
                               const KsConfig& cfg = {});

struct AiryCount {
  long count = 0;    // eigenvalues below lambda: passages of the canonical
                     // solution through the Dirichlet direction
  long blowups = 0;  // passages of r_lambda through infinity (diagnostic;
                     // one more than `count` once the phase settles)
  double horizon = 0.0;
};

NoiseRecord airy_noise(double horizon, uint64_t seed, double dt = 5e-4);

// Canonical-system route: integrates the pair u1, u2 of the soft-edge
// operator at spectral value 0 together with the canonical solution at
// lambda on the shared record.  Counts are checked for stability against
// the half-horizon prefix.
AiryCount airy_counting(double beta, double lambda, const NoiseRecord& record);
AiryCount airy_counting(double beta, double lambda, uint64_t seed, double horizon = 0.0);

// Riccati shooting oracle on the identical record.
long airy_riccati_count(double beta, double lambda, const NoiseRecord& record);

}  // namespace carousel
