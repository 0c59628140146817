#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace carousel {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Wronskian pairing a^t J b with J = [[0,-1],[1,0]].
inline double wronskian(Vec2 a, Vec2 b) { return a.y * b.x - a.x * b.y; }

// Real 2x2 matrix, row major.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 transpose() const { return {a, c, b, d}; }
};

// Quadratic form v^t M v.
inline double quad_form(const Mat2& m, Vec2 v) {
  return v.x * (m.a * v.x + m.b * v.y) + v.y * (m.c * v.x + m.d * v.y);
}

// Complex 2x2 matrix, row major. Used for the unit-circle recursions.
struct CMat2 {
  std::complex<double> a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

  CMat2 operator*(const CMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  // Rescale so the largest entry has modulus one; the matrices are only ever
  // used projectively.
  void normalize() {
    double m = std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    if (m > 0.0) {
      a /= m;
      b /= m;
      c /= m;
      d /= m;
    }
  }
};

}  // namespace carousel
