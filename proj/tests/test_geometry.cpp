#include "carousel/geometry.hpp"

#include <cmath>
#include <complex>

#include "carousel/rng.hpp"
#include "doctest.h"

using namespace carousel;

namespace {

PlanePoint random_point(Rng& rng) {
  return {4.0 * rng.uniform() - 2.0, std::exp(2.0 * rng.uniform() - 1.0)};
}

IsometryMatrix random_isometry(Rng& rng) {
  // det > 0 via a*d - b*c with d chosen to dominate
  IsometryMatrix m;
  m.a = 2.0 * rng.uniform() - 1.0 + 1.5;
  m.b = 2.0 * rng.uniform() - 1.0;
  m.c = 2.0 * rng.uniform() - 1.0;
  m.d = (1.0 + m.b * m.c + rng.uniform()) / m.a;
  if (m.det() <= 0.0) m.d += 1.0 / m.a;
  return m;
}

}  // namespace

TEST_CASE("cayley transform values") {
  CHECK(std::abs(cayley({0.0, 1.0})) < 1e-15);                       // i -> 0
  CHECK(cayley_boundary(BoundaryPoint::infinity()) == 0.0);          // infinity -> 1
  CHECK(cayley_boundary(BoundaryPoint::real(0.0)) ==
        doctest::Approx(3.14159265358979324).epsilon(1e-14));        // 0 -> -1
  CHECK(std::abs(cayley({0.0, 2.0}) - std::complex<double>(1.0 / 3.0, 0.0)) < 1e-15);
}

TEST_CASE("cayley round trip on random points") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    PlanePoint p = random_point(rng);
    PlanePoint back = cayley_inv(cayley(p));
    CHECK(std::abs(back.x - p.x) < 1e-12);
    CHECK(std::abs(back.y - p.y) < 1e-12);
  }
}

TEST_CASE("hyperbolic distance") {
  CHECK(hyperbolic_distance({0.0, 1.0}, {0.0, 1.0}) == 0.0);
  CHECK(hyperbolic_distance({0.0, 1.0}, {0.0, 2.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-13));

  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    PlanePoint p = random_point(rng), q = random_point(rng);
    IsometryMatrix m = random_isometry(rng);
    double d1 = hyperbolic_distance(p, q);
    double d2 = hyperbolic_distance(apply_isometry(m, p), apply_isometry(m, q));
    CHECK(std::abs(d1 - d2) < 1e-10);
    CHECK(std::abs(d1 - hyperbolic_distance(q, p)) < 1e-14);
  }
}

TEST_CASE("horocyclic distance") {
  CHECK(horocyclic_distance(BoundaryPoint::infinity(), {0.0, 2.0}, {0.0, 1.0}) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-13));
  PlanePoint a{0.7, 1.3};
  CHECK(horocyclic_distance(BoundaryPoint::real(0.4), a, a) == 0.0);
  CHECK(horocyclic_distance(BoundaryPoint::real(0.0), {1.0, 1.0}, {0.0, 1.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));

  // |d_xi(a,b)| <= d(a,b)
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    PlanePoint p = random_point(rng), q = random_point(rng);
    BoundaryPoint xi = (i % 5 == 0) ? BoundaryPoint::infinity()
                                    : BoundaryPoint::real(4.0 * rng.uniform() - 2.0);
    CHECK(std::abs(horocyclic_distance(xi, p, q)) <= hyperbolic_distance(p, q) + 1e-10);
  }
}

TEST_CASE("isometry action") {
  PlanePoint z{0.3, 0.8};
  PlanePoint same = apply_isometry({1, 0, 0, 1}, z);
  CHECK(same.x == doctest::Approx(z.x));
  CHECK(same.y == doctest::Approx(z.y));

  // X = [[1,-x],[0,y]] takes x+iy to i
  IsometryMatrix x_mat{1.0, -z.x, 0.0, z.y};
  PlanePoint to_i = apply_isometry(x_mat, z);
  CHECK(std::abs(to_i.x) < 1e-15);
  CHECK(to_i.y == doctest::Approx(1.0));

  BoundaryPoint img = apply_isometry({0, -1, 1, 0}, BoundaryPoint::real(0.0));
  CHECK(img.is_infinity());
}

TEST_CASE("positive definite representation") {
  Mat2 id = positive_definite_rep({0.0, 1.0});
  CHECK(id.a == doctest::Approx(1.0));
  CHECK(id.b == doctest::Approx(0.0));
  CHECK(id.d == doctest::Approx(1.0));

  Mat2 r2 = positive_definite_rep({0.0, 2.0});
  CHECK(r2.a == doctest::Approx(0.5));
  CHECK(r2.d == doctest::Approx(2.0));

  Mat2 r3 = positive_definite_rep({1.0, 1.0});
  CHECK(r3.a == doctest::Approx(1.0));
  CHECK(r3.b == doctest::Approx(-1.0));
  CHECK(r3.c == doctest::Approx(-1.0));
  CHECK(r3.d == doctest::Approx(2.0));

  Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    Mat2 r = positive_definite_rep(random_point(rng));
    CHECK(std::abs(r.det() - 1.0) < 1e-12);
    CHECK(r.a > 0.0);
  }
}

TEST_CASE("hyperbolic angle") {
  CHECK(hyperbolic_angle(BoundaryPoint::infinity()) == 0.0);
  CHECK(hyperbolic_angle(BoundaryPoint::real(0.0)) == doctest::Approx(-3.14159265358979324));
  CHECK(hyperbolic_angle(BoundaryPoint::real(1.0)) == doctest::Approx(-1.57079632679489662));
}

TEST_CASE("boundary angle round trip") {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    double r = 20.0 * rng.uniform() - 10.0;
    BoundaryPoint back = boundary_from_angle(boundary_angle(BoundaryPoint::real(r)));
    REQUIRE(!back.is_infinity());
    CHECK(back.value() == doctest::Approx(r).epsilon(1e-11));
  }
  CHECK(boundary_from_angle(boundary_angle(BoundaryPoint::infinity())).is_infinity());
}
