#pragma once

#include <complex>
#include <optional>

#include "carousel/mat2.hpp"

namespace carousel {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Point of the upper half plane, y > 0.
struct PlanePoint {
  double x = 0.0;
  double y = 1.0;
};

// Point of the Poincare disk, |w| < 1.
using DiskCoord = std::complex<double>;

// Boundary point of the hyperbolic plane: a real number or infinity.
// Infinity is an explicit variant, never a large float; the carousel blows
// through it routinely.
class BoundaryPoint {
 public:
  static BoundaryPoint infinity() { return BoundaryPoint(true, 0.0); }
  static BoundaryPoint real(double r) { return BoundaryPoint(false, r); }

  bool is_infinity() const { return infinite_; }
  double value() const { return r_; }

  bool operator==(const BoundaryPoint& o) const {
    return infinite_ == o.infinite_ && (infinite_ || r_ == o.r_);
  }

 private:
  BoundaryPoint(bool inf, double r) : infinite_(inf), r_(r) {}
  bool infinite_;
  double r_;
};

// Real 2x2 matrix with positive determinant acting projectively on the half
// plane and its boundary.
struct IsometryMatrix {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double det() const { return a * d - b * c; }
};

double reduce_mod_2pi(double phi);  // into [0, 2pi)

DiskCoord cayley(PlanePoint p);
PlanePoint cayley_inv(DiskCoord w);

// Boundary extension of the Cayley map; returns the disk angle in [0, 2pi).
double cayley_boundary(BoundaryPoint p);
BoundaryPoint cayley_inv_boundary(double theta);

double hyperbolic_distance(PlanePoint p, PlanePoint q);

// Signed horocyclic distance d_xi(a, i) - d_xi(b, i).
double horocyclic_distance(BoundaryPoint xi, PlanePoint a, PlanePoint b);

PlanePoint apply_isometry(const IsometryMatrix& m, PlanePoint z);
BoundaryPoint apply_isometry(const IsometryMatrix& m, BoundaryPoint z);

// R = X^t X / det X with X = [[1,-x],[0,y]]; symmetric, det = 1.
Mat2 positive_definite_rep(PlanePoint p);

// angle(infinity, i, r) = -2 arccot(r), in (-2pi, 0].
double hyperbolic_angle(BoundaryPoint r);

// Angle of a boundary point on the disk circle, reduced to [0, 2pi).
// Identical to cayley_boundary; kept as the name used by boundary conditions.
inline double boundary_angle(BoundaryPoint r) { return cayley_boundary(r); }

// Inverse of boundary_angle: the boundary point -cot(theta/2), infinity at 0.
BoundaryPoint boundary_from_angle(double theta);

}  // namespace carousel
