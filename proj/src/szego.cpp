#include "carousel/szego.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carousel/errors.hpp"
#include "carousel/mat2.hpp"

namespace carousel {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846264338328;

double reduce_to_pm_pi(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

}  // namespace

void VerblunskyCoefficients::validate() const {
  if (alpha.empty()) throw std::invalid_argument("VerblunskyCoefficients: empty");
  for (size_t k = 0; k + 1 < alpha.size(); ++k)
    if (!(std::abs(alpha[k]) < 1.0))
      throw std::invalid_argument("VerblunskyCoefficients: |alpha_k| < 1 required for k < n-1");
  if (std::abs(std::abs(alpha.back()) - 1.0) > 1e-8)
    throw std::invalid_argument("VerblunskyCoefficients: |alpha_{n-1}| = 1 required");
}

void DeformedVerblunsky::validate() const {
  if (gamma.empty()) throw std::invalid_argument("DeformedVerblunsky: empty");
  for (size_t k = 0; k + 1 < gamma.size(); ++k)
    if (!(std::abs(gamma[k]) < 1.0))
      throw std::invalid_argument("DeformedVerblunsky: |gamma_k| < 1 required for k < n-1");
  if (std::abs(std::abs(gamma.back()) - 1.0) > 1e-8)
    throw std::invalid_argument("DeformedVerblunsky: |gamma_{n-1}| = 1 required");
  for (const auto& g : gamma)
    if (std::abs(1.0 - g) < 1e-12)
      throw DenominatorBlowup("DeformedVerblunsky: gamma_k too close to 1");
}

std::pair<cplx, cplx> szego_eval(const VerblunskyCoefficients& coeffs, cplx z) {
  cplx phi(1.0, 0.0), phis(1.0, 0.0);
  for (const auto& a : coeffs.alpha) {
    cplx zphi = z * phi;
    cplx next = zphi - std::conj(a) * phis;
    phis = phis - a * zphi;
    phi = next;
  }
  return {phi, phis};
}

VerblunskyCoefficients verblunsky_from_measure(const EigenAngles& angles,
                                               const std::vector<double>& weights) {
  const size_t n = angles.angles.size();
  if (n == 0 || weights.size() != n)
    throw std::invalid_argument("verblunsky_from_measure: need matching angles and weights");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("verblunsky_from_measure: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("verblunsky_from_measure: weights must sum to 1");
  std::vector<double> sorted = angles.angles;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i + 1] - sorted[i] < 1e-12)
      throw DegenerateMeasure("verblunsky_from_measure: coincident support angles");

  std::vector<cplx> z(n), p(n, cplx(1.0, 0.0)), q(n, cplx(1.0, 0.0));
  for (size_t j = 0; j < n; ++j) z[j] = std::polar(1.0, angles.angles[j]);

  VerblunskyCoefficients out;
  out.alpha.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    // <z Phi_k, 1> / <Phi_k^*, 1> determines conj(alpha_k).
    cplx num(0.0, 0.0), den(0.0, 0.0);
    for (size_t j = 0; j < n; ++j) {
      num += weights[j] * z[j] * p[j];
      den += weights[j] * q[j];
    }
    if (std::abs(den) < 1e-14)
      throw DegenerateMeasure("verblunsky_from_measure: vanishing normalization");
    cplx abar = num / den;
    cplx a = std::conj(abar);
    for (size_t j = 0; j < n; ++j) {
      cplx zp = z[j] * p[j];
      p[j] = zp - abar * q[j];
      q[j] = q[j] - a * zp;
    }
    out.alpha.push_back(a);
  }
  // The final coefficient is unimodular for an n-atom measure; snap it.
  double mod = std::abs(out.alpha.back());
  if (std::abs(mod - 1.0) > 1e-6)
    throw DegenerateMeasure("verblunsky_from_measure: final coefficient not unimodular");
  out.alpha.back() /= mod;
  return out;
}

EigenAngles eigen_angles_oracle(const VerblunskyCoefficients& coeffs) {
  coeffs.validate();
  const size_t n = coeffs.n();
  // With |alpha_{n-1}| = 1 the polynomial is self-inversive, so
  // H(theta) = Re(c e^{-i n theta / 2} Phi_n(e^{i theta})) with
  // c^2 = -conj... c = e^{i chi}, 2 chi = arg(-alpha_{n-1}), is real with
  // |H| = |Phi_n|: its sign changes bracket exactly the n circle roots.
  double chi = 0.5 * std::arg(-coeffs.alpha.back());
  auto h = [&](double theta) {
    auto [phi, phis] = szego_eval(coeffs, std::polar(1.0, theta));
    (void)phis;
    cplx v = std::polar(1.0, chi - 0.5 * double(n) * theta) * phi;
    return v.real();
  };

  size_t density = 8 * n;
  const size_t max_density = (size_t(1) << 14) * n;
  std::vector<std::pair<double, double>> brackets;  // sign-change intervals
  std::vector<double> exact;                        // roots hit by the scan itself
  while (true) {
    brackets.clear();
    exact.clear();
    std::vector<double> vals(density + 1);
    for (size_t j = 0; j < density; ++j) vals[j] = h(kTwoPi * double(j) / double(density));
    vals[density] = (n % 2) ? -vals[0] : vals[0];  // H(theta + 2pi) = (-1)^n H(theta)

    bool have_last = false;
    double last_val = 0.0, last_theta = 0.0;
    bool swallow = false;  // a recorded exact zero separates the signs around it
    for (size_t j = 0; j <= density; ++j) {
      double theta = kTwoPi * double(j) / double(density);
      if (vals[j] == 0.0) {
        if (j < density) exact.push_back(theta);
        swallow = true;
        continue;
      }
      if (have_last && !swallow && std::signbit(vals[j]) != std::signbit(last_val))
        brackets.emplace_back(last_theta, theta);
      last_val = vals[j];
      last_theta = theta;
      have_last = true;
      swallow = false;
    }
    if (brackets.size() + exact.size() == n) break;
    if (density >= max_density)
      throw RootCountMismatch("eigen_angles_oracle: could not isolate n circle roots");
    density *= 2;
  }

  EigenAngles out;
  out.angles.reserve(n);
  for (double theta : exact) out.angles.push_back(reduce_to_pm_pi(theta));
  for (auto [a, b] : brackets) {
    double ha = h(a);
    while (b - a > 1e-12) {
      double mid = 0.5 * (a + b);
      double hm = h(mid);
      if (hm == 0.0) {
        a = b = mid;
        break;
      }
      if (std::signbit(hm) == std::signbit(ha)) {
        a = mid;
        ha = hm;
      } else {
        b = mid;
      }
    }
    out.angles.push_back(reduce_to_pm_pi(0.5 * (a + b)));
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

CarouselPath carousel_path(const VerblunskyCoefficients& coeffs) {
  coeffs.validate();
  const size_t n = coeffs.n();
  CarouselPath out;
  out.centers.reserve(n);
  // N_k = A_0^{-1} ... A_{k-1}^{-1}, accumulated projectively.
  CMat2 acc;
  out.centers.push_back(cplx(0.0, 0.0));  // b_0 = 0
  for (size_t k = 0; k < n; ++k) {
    CMat2 inv;  // A_k^{-1} up to scalar
    inv.a = 1.0;
    inv.b = std::conj(coeffs.alpha[k]);
    inv.c = coeffs.alpha[k];
    inv.d = 1.0;
    acc = acc * inv;
    acc.normalize();
    cplx b = acc.b / acc.d;
    if (k + 1 < n)
      out.centers.push_back(b);
    else
      out.terminal = b;
  }
  return out;
}

AffineWalk deformed_pipeline(const DeformedVerblunsky& coeffs) {
  coeffs.validate();
  const size_t n = coeffs.n();
  AffineWalk out;
  out.x.assign(n + 1, 0.0);
  out.y.assign(n + 1, 0.0);
  out.disk_centers.assign(n + 1, cplx(0.0, 0.0));
  out.y[0] = 1.0;
  cplx b(0.0, 0.0);
  for (size_t k = 0; k < n; ++k) {
    cplx ratio = coeffs.gamma[k] / (1.0 - coeffs.gamma[k]);
    double w = 2.0 * ratio.real();
    double v = -2.0 * ratio.imag();
    out.x[k + 1] = out.x[k] + v * out.y[k];
    out.y[k + 1] = out.y[k] * (1.0 + w);
    cplx m = (1.0 - b) / (1.0 - std::conj(b));
    b = (b + coeffs.gamma[k] * m) / (1.0 + std::conj(b) * coeffs.gamma[k] * m);
    out.disk_centers[k + 1] = b;
  }
  // |gamma_{n-1}| = 1 forces 1 + w_{n-1} = 0 exactly in reals; clamp rounding.
  if (std::abs(out.y[n]) < 1e-9) out.y[n] = 0.0;
  out.terminal_x = out.x[n];
  return out;
}

DeformedVerblunsky deform(const VerblunskyCoefficients& coeffs) {
  coeffs.validate();
  DeformedVerblunsky out;
  out.gamma.reserve(coeffs.n());
  cplx phi(1.0, 0.0), phis(1.0, 0.0);
  for (const auto& a : coeffs.alpha) {
    if (std::abs(phi) < 1e-12)
      throw DenominatorBlowup("deform: Phi_k(1) vanishes, 1 is an eigenvalue");
    out.gamma.push_back(std::conj(a) * phis / phi);
    cplx zphi = phi;  // z = 1
    cplx next = zphi - std::conj(a) * phis;
    phis = phis - a * zphi;
    phi = next;
  }
  out.validate();
  return out;
}

namespace {

DiracOperator operator_from_disk_centers(const std::vector<cplx>& centers, double phi1_angle) {
  const size_t n = centers.size();
  DrivingPath path;
  path.grid.resize(n + 1);
  path.values.reserve(n);
  path.weight.assign(n, 0.5);
  for (size_t k = 0; k <= n; ++k) path.grid[k] = double(k) / double(n);
  for (const auto& b : centers) path.values.push_back(cayley_inv(b));
  path.horizon = 1.0;
  path.tail_rule = EndpointClass::LimitCircle;
  return DiracOperator::make_allowing_parallel(std::move(path), BoundaryCondition::from_angle(0.0),
                                               BoundaryCondition::from_angle(phi1_angle));
}

}  // namespace

DiracOperator unitary_dirac_operator(const VerblunskyCoefficients& coeffs) {
  CarouselPath cp = carousel_path(coeffs);
  return operator_from_disk_centers(cp.centers, std::arg(cp.terminal));
}

DiracOperator unitary_dirac_operator(const DeformedVerblunsky& coeffs) {
  AffineWalk walk = deformed_pipeline(coeffs);
  const size_t n = coeffs.n();
  DrivingPath path;
  path.grid.resize(n + 1);
  path.values.reserve(n);
  path.weight.assign(n, 0.5);
  for (size_t k = 0; k <= n; ++k) path.grid[k] = double(k) / double(n);
  for (size_t k = 0; k < n; ++k) path.values.push_back({walk.x[k], walk.y[k]});
  path.horizon = 1.0;
  path.tail_rule = EndpointClass::LimitCircle;
  return DiracOperator::make_allowing_parallel(
      std::move(path), BoundaryCondition::from_angle(0.0),
      BoundaryCondition::from_point(BoundaryPoint::real(walk.terminal_x)));
}

}  // namespace carousel
