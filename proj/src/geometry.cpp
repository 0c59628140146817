#include "carousel/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace carousel {

double reduce_mod_2pi(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

DiskCoord cayley(PlanePoint p) {
  // U(z) = (z - i)/(z + i)
  std::complex<double> z(p.x, p.y);
  return (z - std::complex<double>(0.0, 1.0)) / (z + std::complex<double>(0.0, 1.0));
}

PlanePoint cayley_inv(DiskCoord w) {
  // U^{-1}(w) = i (w + 1)/(1 - w)
  std::complex<double> z = std::complex<double>(0.0, 1.0) * (w + 1.0) / (1.0 - w);
  return {z.real(), z.imag()};
}

double cayley_boundary(BoundaryPoint p) {
  if (p.is_infinity()) return 0.0;
  // -2 arccot(r) mod 2pi, with arccot(r) = atan2(1, r) in (0, pi).
  return reduce_mod_2pi(-2.0 * std::atan2(1.0, p.value()));
}

BoundaryPoint cayley_inv_boundary(double theta) {
  double t = reduce_mod_2pi(theta);
  if (t == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::real(-1.0 / std::tan(0.5 * t));
}

BoundaryPoint boundary_from_angle(double theta) { return cayley_inv_boundary(theta); }

double hyperbolic_distance(PlanePoint p, PlanePoint q) {
  double dx = p.x - q.x;
  double dy = p.y - q.y;
  return std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y));
}

double horocyclic_distance(BoundaryPoint xi, PlanePoint a, PlanePoint b) {
  // d_q(x+iy, i) = log(((x-q)^2 + y^2)/((1+q^2) y)),  d_inf(x+iy, i) = log(1/y)
  auto to_i = [&xi](PlanePoint p) {
    if (xi.is_infinity()) return std::log(1.0 / p.y);
    double q = xi.value();
    double dx = p.x - q;
    return std::log((dx * dx + p.y * p.y) / ((1.0 + q * q) * p.y));
  };
  return to_i(a) - to_i(b);
}

PlanePoint apply_isometry(const IsometryMatrix& m, PlanePoint z) {
  std::complex<double> w(z.x, z.y);
  std::complex<double> r = (m.a * w + m.b) / (m.c * w + m.d);
  return {r.real(), r.imag()};
}

BoundaryPoint apply_isometry(const IsometryMatrix& m, BoundaryPoint z) {
  if (z.is_infinity()) {
    if (m.c == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::real(m.a / m.c);
  }
  double num = m.a * z.value() + m.b;
  double den = m.c * z.value() + m.d;
  if (den == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::real(num / den);
}

Mat2 positive_definite_rep(PlanePoint p) {
  if (!(p.y > 0.0)) throw std::invalid_argument("positive_definite_rep: y must be positive");
  // X = [[1,-x],[0,y]], R = X^t X / det X = (1/y) [[1,-x],[-x,x^2+y^2]]
  double inv_y = 1.0 / p.y;
  return {inv_y, -p.x * inv_y, -p.x * inv_y, (p.x * p.x + p.y * p.y) * inv_y};
}

double hyperbolic_angle(BoundaryPoint r) {
  if (r.is_infinity()) return 0.0;
  return -2.0 * std::atan2(1.0, r.value());
}

}  // namespace carousel
