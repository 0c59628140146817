#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "carousel/dirac.hpp"

namespace carousel {

// Verblunsky coefficients: |alpha_k| < 1 for k < n-1, |alpha_{n-1}| = 1.
struct VerblunskyCoefficients {
  std::vector<std::complex<double>> alpha;

  size_t n() const { return alpha.size(); }
  void validate() const;
};

// Deformed Verblunsky coefficients: same moduli constraints, gamma_k != 1.
struct DeformedVerblunsky {
  std::vector<std::complex<double>> gamma;

  size_t n() const { return gamma.size(); }
  void validate() const;
};

// Eigenvalue angles in [-pi, pi), sorted, distinct.
struct EigenAngles {
  std::vector<double> angles;
};

// One full run of the Szego recursion: returns (Phi_n(z), Phi_n^*(z)).
std::pair<std::complex<double>, std::complex<double>> szego_eval(
    const VerblunskyCoefficients& coeffs, std::complex<double> z);

// Monic orthogonal polynomials of the discrete measure sum w_j delta(e^{i angle_j}),
// inner products by direct summation over the support.
VerblunskyCoefficients verblunsky_from_measure(const EigenAngles& angles,
                                               const std::vector<double>& weights);

// The n roots of Phi_n on the unit circle, located by a dense angular scan of
// a real-valued rotation of Phi_n plus bisection.
EigenAngles eigen_angles_oracle(const VerblunskyCoefficients& coeffs);

// Piecewise constant carousel data in Poincare disk coordinates:
// b_k = P(A_0^{-1} ... A_{k-1}^{-1} (0,1)^t), |b_k| < 1 for k < n, |b_n| = 1.
struct CarouselPath {
  std::vector<std::complex<double>> centers;  // b_0 .. b_{n-1}
  std::complex<double> terminal;              // b_n on the circle
};
CarouselPath carousel_path(const VerblunskyCoefficients& coeffs);

// Affine walk of the deformed pipeline in half-plane coordinates,
// x_{k+1} = x_k + v_k y_k, y_{k+1} = y_k (1 + w_k), plus the disk centers
// from the b-recursion for cross-checking.
struct AffineWalk {
  std::vector<double> x, y;  // k = 0..n, with y[n] = 0
  double terminal_x = 0.0;
  std::vector<std::complex<double>> disk_centers;  // b_0 .. b_n
};
AffineWalk deformed_pipeline(const DeformedVerblunsky& coeffs);

// Deformed coefficients gamma_k = conj(alpha_k) Phi_k^*(1) / Phi_k(1);
// requires that 1 is not an eigenvalue.
DeformedVerblunsky deform(const VerblunskyCoefficients& coeffs);

// Dirac operator on [0,1) whose spectrum is {n lambda_k + 2 pi n j}.
DiracOperator unitary_dirac_operator(const VerblunskyCoefficients& coeffs);
DiracOperator unitary_dirac_operator(const DeformedVerblunsky& coeffs);

}  // namespace carousel
