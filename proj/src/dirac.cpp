#include "carousel/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>

#include "carousel/errors.hpp"

namespace carousel {

namespace {

using cplx = std::complex<double>;

double angle_gap(double a, double b) {
  double d = reduce_mod_2pi(a - b);
  return std::min(d, kTwoPi - d);
}

// Number of lattice points target + 2pi k in the half-open interval (lo, hi].
long lattice_count(double lo, double hi, double target) {
  if (!(hi > lo)) return 0;
  return static_cast<long>(std::floor((hi - target) / kTwoPi)) -
         static_cast<long>(std::floor((lo - target) / kTwoPi));
}

// Exact propagation of the lifted boundary angle through one piecewise
// constant cell: rotation by theta about the cell center x + iy, conjugated
// through the affine map taking x + iy to i.  The half-angle forms stay
// stable when the path runs toward the boundary (y down to denormals),
// where disk-model arithmetic in gamma loses 1 - |gamma| to rounding.
double affine_angle_fwd(double phi, double x, double y) {
  double k = std::floor(phi / kTwoPi);
  double red = phi - kTwoPi * k;
  double s = std::sin(0.5 * red), c = std::cos(0.5 * red);
  // boundary point r = -cot(red/2) maps to (r - x)/y
  double psi = (red == 0.0) ? 0.0 : kTwoPi - 2.0 * std::atan2(y * s, -(c + x * s));
  return psi + kTwoPi * k;
}

double affine_angle_inv(double psi, double x, double y) {
  double k = std::floor(psi / kTwoPi);
  double red = psi - kTwoPi * k;
  double s = std::sin(0.5 * red), c = std::cos(0.5 * red);
  // boundary point r' = -cot(red/2) maps to y r' + x
  double phi = (red == 0.0) ? 0.0 : kTwoPi - 2.0 * std::atan2(s, x * s - y * c);
  return phi + kTwoPi * k;
}

double rotate_about_cell(double phi, PlanePoint p, double theta) {
  return affine_angle_inv(affine_angle_fwd(phi, p.x, p.y) + theta, p.x, p.y);
}

// Phase speed |e^{i phi} - gamma|^2 / (1 - |gamma|^2) in half-plane data:
// ((x sin(phi/2) + cos(phi/2))^2 + y^2 sin^2(phi/2)) / y.
double phase_speed(double phi, PlanePoint p) {
  double s = std::sin(0.5 * phi), c = std::cos(0.5 * phi);
  double u = p.x * s + c;
  return (u * u + p.y * p.y * s * s) / p.y;
}

struct PathView {
  const DrivingPath* path;
  size_t ncells;

  double t_end() const { return path->grid[ncells]; }
};

PlanePoint interp_cell(const DrivingPath& path, size_t i, double t) {
  PlanePoint a = path.values[i];
  if (path.interpolation == Interpolation::PiecewiseConstant) return a;
  PlanePoint b = (i + 1 < path.values.size()) ? path.values[i + 1] : path.values[i];
  double u = (t - path.grid[i]) / (path.grid[i + 1] - path.grid[i]);
  return {a.x + u * (b.x - a.x), a.y * std::pow(b.y / a.y, u)};
}

// Dormand-Prince 5(4), adaptive, direction-agnostic.
template <typename Rhs>
double rk45(const Rhs& rhs, double t0, double t1, double y0, double rtol, double atol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double span = t1 - t0;
  if (span == 0.0) return y0;
  double t = t0, y = y0;
  double h = span;
  const double hmin = std::abs(span) * 1e-14;
  int steps = 0;
  while ((span > 0.0) ? (t < t1) : (t > t1)) {
    if ((span > 0.0) ? (t + h > t1) : (t + h < t1)) h = t1 - t;
    double k1 = rhs(t, y);
    double k2 = rhs(t + c2 * h, y + h * a21 * k1);
    double k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    double k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    double k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = rhs(t + h, ynew);
    double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    double tol = atol + rtol * std::max(std::abs(y), std::abs(ynew));
    if (err <= tol || std::abs(h) <= hmin) {
      t += h;
      y = ynew;
    }
    double scale = (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    scale = std::clamp(scale, 0.2, 5.0);
    h *= scale;
    if (std::abs(h) < hmin) h = (span > 0.0 ? hmin : -hmin);
    if (++steps > 20000000) throw NumericError("rk45: step limit exceeded");
  }
  return y;
}

struct PhaseResult {
  double terminal;
  long crossings;  // passages of phi1 + 2pi Z, terminal hit included
};

// Forward phase integration in disk coordinates.  Piecewise constant cells
// advance by the exact conjugated rotation; interpolated cells by rk45 on
// phi' = 2 f lambda |e^{i phi} - gamma(t)|^2 / (1 - |gamma(t)|^2).
PhaseResult phase_forward_impl(PathView view, double phi0, double phi1, double lambda,
                               const SolverConfig& cfg, std::vector<double>* samples) {
  const DrivingPath& path = *view.path;
  double phi = phi0;
  long crossings = 0;
  const double guard = cfg.max_winding * kTwoPi;
  if (samples) samples->push_back(phi);
  for (size_t i = 0; i < view.ncells; ++i) {
    double dt = path.grid[i + 1] - path.grid[i];
    double prev = phi;
    if (path.interpolation == Interpolation::PiecewiseConstant) {
      phi = rotate_about_cell(phi, path.values[i], 2.0 * lambda * path.weight[i] * dt);
    } else {
      double f = path.weight[i];
      auto rhs = [&](double t, double p) {
        return 2.0 * f * lambda * phase_speed(p, interp_cell(path, i, t));
      };
      phi = rk45(rhs, path.grid[i], path.grid[i + 1], phi, cfg.ode_rel_tol, cfg.ode_abs_tol);
    }
    if (lambda > 0.0)
      crossings += lattice_count(prev, phi, phi1);
    else if (lambda < 0.0)
      crossings += lattice_count(-prev, -phi, -phi1);
    if (std::abs(phi - phi0) > guard)
      throw WindingGuardExceeded("phase_forward: winding guard exceeded");
    if (samples) samples->push_back(phi);
  }
  return {phi, crossings};
}

// Backward (reverse) integration from the prefix end with value phi1.
double phase_backward_impl(PathView view, double phi1, double lambda, const SolverConfig& cfg) {
  const DrivingPath& path = *view.path;
  double rho = phi1;
  const double guard = cfg.max_winding * kTwoPi;
  for (size_t ii = view.ncells; ii-- > 0;) {
    double dt = path.grid[ii + 1] - path.grid[ii];
    if (path.interpolation == Interpolation::PiecewiseConstant) {
      rho = rotate_about_cell(rho, path.values[ii], -2.0 * lambda * path.weight[ii] * dt);
    } else {
      double f = path.weight[ii];
      auto rhs = [&](double t, double p) {
        return 2.0 * f * lambda * phase_speed(p, interp_cell(path, ii, t));
      };
      rho = rk45(rhs, path.grid[ii + 1], path.grid[ii], rho, cfg.ode_rel_tol, cfg.ode_abs_tol);
    }
    if (std::abs(rho - phi1) > guard)
      throw WindingGuardExceeded("phase_reverse: winding guard exceeded");
  }
  return rho;
}

// Grid prefixes for truncation refinement: distances horizon - t decreasing
// by cfg.truncation_factor down to the grid end.
std::vector<size_t> truncation_ladder(const DrivingPath& path, const SolverConfig& cfg) {
  std::vector<size_t> ends;
  const size_t m = path.cells();
  double eps_min = path.horizon - path.grid[m];
  double eps = eps_min;
  for (int lvl = 1; lvl < cfg.truncation_levels; ++lvl) eps *= cfg.truncation_factor;
  for (; eps >= eps_min; eps /= cfg.truncation_factor) {
    size_t idx = m;
    while (idx > 1 && path.horizon - path.grid[idx - 1] <= eps) --idx;
    if (ends.empty() || ends.back() != idx) ends.push_back(idx);
  }
  if (ends.empty() || ends.back() != m) ends.push_back(m);
  return ends;
}

std::vector<double> solve_window(PathView view, double phi0, double phi1, double lo, double hi,
                                 const SolverConfig& cfg) {
  auto terminal = [&](double lam) {
    return phase_forward_impl(view, phi0, phi1, lam, cfg, nullptr).terminal;
  };
  double jlo = terminal(lo), jhi = terminal(hi);
  std::vector<double> roots;
  long kmin = static_cast<long>(std::ceil((jlo - phi1) / kTwoPi - 1e-12));
  long kmax = static_cast<long>(std::floor((jhi - phi1) / kTwoPi + 1e-12));
  for (long k = kmin; k <= kmax; ++k) {
    double level = phi1 + kTwoPi * k;
    if (level < jlo || level > jhi) continue;
    double a = lo, b = hi;
    while (b - a > cfg.bisection_tol) {
      double mid = 0.5 * (a + b);
      (terminal(mid) < level ? a : b) = mid;
    }
    roots.push_back(0.5 * (a + b));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Largest relative displacement between matched points of two truncation
// levels; infinite when an interior point has no partner.  Points may enter
// or leave near the window edges as the truncation moves.
double point_sets_distance(const std::vector<double>& a, const std::vector<double>& b, double lo,
                           double hi, double tol) {
  const double inf = std::numeric_limits<double>::infinity();
  double edge = std::max(16.0 * tol, 1e-9 * (hi - lo));
  double dist = 0.0;
  size_t i = 0, j = 0;
  auto interior = [&](double x) { return std::min(x - lo, hi - x) > edge; };
  while (i < a.size() && j < b.size()) {
    double rel = std::abs(a[i] - b[j]) / std::max(1.0, std::abs(a[i]));
    if (rel <= tol || std::abs(a[i] - b[j]) <= 0.05 * std::abs((i + 1 < a.size() ? a[i + 1] : hi) - a[i])) {
      dist = std::max(dist, rel);
      ++i;
      ++j;
      continue;
    }
    if (a[i] < b[j]) {
      if (interior(a[i])) return inf;
      ++i;
    } else {
      if (interior(b[j])) return inf;
      ++j;
    }
  }
  for (; i < a.size(); ++i)
    if (interior(a[i])) return inf;
  for (; j < b.size(); ++j)
    if (interior(b[j])) return inf;
  return dist;
}

}  // namespace

void DrivingPath::validate() const {
  if (grid.size() < 2) throw std::invalid_argument("DrivingPath: need at least one cell");
  if (values.size() + 1 != grid.size() || weight.size() != values.size())
    throw std::invalid_argument("DrivingPath: values/weight must have one entry per cell");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("DrivingPath: grid must be strictly increasing");
  for (const auto& v : values)
    if (!(v.y > 0.0) || !std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("DrivingPath: path values must satisfy y > 0");
  for (double f : weight)
    if (!(f > 0.0)) throw std::invalid_argument("DrivingPath: weight must be positive");
  if (horizon < grid.back()) throw std::invalid_argument("DrivingPath: horizon < grid end");
  if (truncated() && !boundary_limit)
    throw std::invalid_argument("DrivingPath: truncated path needs a boundary limit");
}

DrivingPath DrivingPath::constant(PlanePoint p, double f, double t_end, size_t cells) {
  DrivingPath path;
  path.grid.resize(cells + 1);
  for (size_t i = 0; i <= cells; ++i) path.grid[i] = t_end * double(i) / double(cells);
  path.values.assign(cells, p);
  path.weight.assign(cells, f);
  path.horizon = t_end;
  return path;
}

Vec2 BoundaryCondition::direction() const {
  return {std::cos(0.5 * phi), -std::sin(0.5 * phi)};
}

DiracOperator::DiracOperator(DrivingPath path, BoundaryCondition bc0, BoundaryCondition bc1,
                             bool parallel)
    : path_(std::move(path)), bc0_(bc0), bc1_(bc1), parallel_(parallel) {
  endpoint_class_ = carousel::classify_endpoint(path_);
}

DiracOperator DiracOperator::make(DrivingPath path, BoundaryCondition bc0, BoundaryCondition bc1) {
  path.validate();
  if (angle_gap(bc0.phi, bc1.phi) < 1e-14)
    throw DegenerateBoundaryConditions("DiracOperator: boundary conditions are parallel");
  return DiracOperator(std::move(path), bc0, bc1, false);
}

DiracOperator DiracOperator::make_allowing_parallel(DrivingPath path, BoundaryCondition bc0,
                                                    BoundaryCondition bc1) {
  path.validate();
  bool parallel = angle_gap(bc0.phi, bc1.phi) < 1e-14;
  return DiracOperator(std::move(path), bc0, bc1, parallel);
}

EndpointClass classify_endpoint(const DrivingPath& path, const SolverConfig& cfg) {
  if (path.tail_rule) return *path.tail_rule;
  // Grid quadrature of f/(1-|gamma|^2) = f (x^2+(y+1)^2)/(4y).
  double q = 0.0;
  for (size_t i = 0; i < path.cells(); ++i) {
    const PlanePoint& p = path.values[i];
    double integrand = path.weight[i] * (p.x * p.x + (p.y + 1.0) * (p.y + 1.0)) / (4.0 * p.y);
    q += integrand * (path.grid[i + 1] - path.grid[i]);
  }
  if (std::abs(q - cfg.classification_ceiling) <= cfg.classification_rel_tol * cfg.classification_ceiling)
    throw IndeterminateClassification("classify_endpoint: quadrature at the convergence threshold");
  return q < cfg.classification_ceiling ? EndpointClass::LimitCircle : EndpointClass::LimitPoint;
}

PhaseFunction phase_forward(const DiracOperator& op, double lambda, const SolverConfig& cfg) {
  PhaseFunction out;
  out.lambda = lambda;
  out.times = op.path().grid;
  phase_forward_impl({&op.path(), op.path().cells()}, op.bc0().phi, op.bc1().phi, lambda, cfg,
                     &out.angles);
  return out;
}

long counting_function(const DiracOperator& op, double lambda, const SolverConfig& cfg) {
  if (lambda == 0.0) return 0;
  auto res = phase_forward_impl({&op.path(), op.path().cells()}, op.bc0().phi, op.bc1().phi,
                                lambda, cfg, nullptr);
  return lambda > 0.0 ? res.crossings : -res.crossings;
}

PointSample eigenvalues(const DiracOperator& op, double lo, double hi, const SolverConfig& cfg) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("eigenvalues: invalid window");
  const DrivingPath& path = op.path();
  PointSample out;
  out.window_lo = lo;
  out.window_hi = hi;
  out.provenance.grid_cells = path.cells();
  out.provenance.eps = path.horizon - path.grid_end();

  if (!path.truncated()) {
    out.points = solve_window({&path, path.cells()}, op.bc0().phi, op.bc1().phi, lo, hi, cfg);
    return out;
  }
  // Singular endpoint: solve on truncations with the same boundary data and
  // refine until the window point set stabilizes.  A level pair within
  // truncation_tol accepts outright; failing that, clear geometric decay of
  // the displacements accepts with the extrapolated residual capped at
  // 50 x truncation_tol.
  std::vector<size_t> ladder = truncation_ladder(path, cfg);
  std::vector<double> prev;
  double prev_move = std::numeric_limits<double>::infinity();
  bool have_prev = false;
  for (size_t li = 0; li < ladder.size(); ++li) {
    std::vector<double> cur =
        solve_window({&path, ladder[li]}, op.bc0().phi, op.bc1().phi, lo, hi, cfg);
    if (have_prev) {
      double move = point_sets_distance(prev, cur, lo, hi, cfg.truncation_tol);
      if (move <= cfg.truncation_tol ||
          (li + 1 == ladder.size() && move <= 0.5 * prev_move &&
           move <= 50.0 * cfg.truncation_tol)) {
        out.points = std::move(cur);
        return out;
      }
      prev_move = move;
    }
    prev = std::move(cur);
    have_prev = true;
  }
  throw TruncationNotConverged("eigenvalues: point set did not stabilize under truncation refinement");
}

double phase_reverse(const DiracOperator& op, double lambda, const SolverConfig& cfg) {
  const DrivingPath& path = op.path();
  if (!path.truncated())
    return phase_backward_impl({&path, path.cells()}, op.bc1().phi, lambda, cfg);
  std::vector<size_t> ladder = truncation_ladder(path, cfg);
  double prev = 0.0;
  bool have_prev = false;
  for (size_t li = 0; li < ladder.size(); ++li) {
    double cur = phase_backward_impl({&path, ladder[li]}, op.bc1().phi, lambda, cfg);
    if (have_prev && std::abs(cur - prev) < cfg.truncation_tol) return cur;
    prev = cur;
    have_prev = true;
  }
  throw TruncationNotConverged("phase_reverse: backward value did not stabilize");
}

PointSample eigenvalues_reverse(const DiracOperator& op, double lo, double hi,
                                const SolverConfig& cfg) {
  if (!(lo < hi)) throw std::invalid_argument("eigenvalues_reverse: invalid window");
  auto rho0 = [&](double lam) { return phase_reverse(op, lam, cfg); };
  // lambda -> rho_lambda(0) is continuous and strictly decreasing.
  double rlo = rho0(lo), rhi = rho0(hi);
  double phi0 = op.bc0().phi;
  PointSample out;
  out.window_lo = lo;
  out.window_hi = hi;
  long kmin = static_cast<long>(std::ceil((rhi - phi0) / kTwoPi - 1e-12));
  long kmax = static_cast<long>(std::floor((rlo - phi0) / kTwoPi + 1e-12));
  for (long k = kmin; k <= kmax; ++k) {
    double level = phi0 + kTwoPi * k;
    if (level > rlo || level < rhi) continue;
    double a = lo, b = hi;
    while (b - a > cfg.bisection_tol) {
      double mid = 0.5 * (a + b);
      (rho0(mid) > level ? a : b) = mid;
    }
    out.points.push_back(0.5 * (a + b));
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

double hs_norm_squared(const DiracOperator& op, const SolverConfig& cfg) {
  if (op.parallel_bc())
    throw DegenerateBoundaryConditions("hs_norm_squared: parallel boundary conditions");
  const DrivingPath& path = op.path();
  Vec2 u0 = op.bc0().direction();
  Vec2 u1 = op.bc1().direction();
  double c = wronskian(u0, u1);  // sin((phi1 - phi0)/2)
  double inv_c2 = 1.0 / (c * c);

  // Panels: the cells themselves for piecewise constant paths, a midpoint
  // refinement for interpolated ones.
  const size_t sub = (path.interpolation == Interpolation::PiecewiseConstant) ? 1 : 16;
  double total = 0.0;
  double cum_a = 0.0;  // int_0^{panel start} u0^t R u0
  for (size_t i = 0; i < path.cells(); ++i) {
    double t0 = path.grid[i], t1 = path.grid[i + 1];
    double dt = (t1 - t0) / double(sub);
    for (size_t s = 0; s < sub; ++s) {
      PlanePoint p = (sub == 1) ? path.values[i] : interp_cell(path, i, t0 + (s + 0.5) * dt);
      Mat2 r = positive_definite_rep(p);
      double f = path.weight[i];
      double a = inv_c2 * f * quad_form(r, u0) * dt;
      double b = f * quad_form(r, u1) * dt;
      total += b * cum_a + 0.5 * a * b;
      cum_a += a;
    }
  }
  total *= 2.0;
  if (!std::isfinite(total) || total > cfg.hs_ceiling)
    throw DivergentNorm("hs_norm_squared: quadrature exceeded the ceiling");
  return total;
}

DiskPath to_disk_coordinates(const DiracOperator& op) {
  DiskPath out;
  const DrivingPath& path = op.path();
  out.grid = path.grid;
  out.weight = path.weight;
  out.centers.reserve(path.cells());
  for (const auto& v : path.values) out.centers.push_back(cayley(v));
  out.phi0 = op.bc0().phi;
  out.phi1 = op.bc1().phi;
  return out;
}

double phase_forward_half_plane(const DiracOperator& op, double lambda, const SolverConfig& cfg) {
  const DrivingPath& path = op.path();
  if (lambda == 0.0) return op.bc0().phi;

  // Chart A holds the boundary point r (|r| <= 3), chart B holds w = -1/r
  // (|w| <= 1/2).  The local angle is -pi + 2 atan(r) in A and
  // 2 atan(w) - 2pi [w > 0] in B; the offset makes the lift continuous and
  // absorbs 2pi per passage of infinity.
  bool chartA;
  double state, offset;
  const double phi0 = op.bc0().phi;
  BoundaryPoint start = op.bc0().point();
  if (start.is_infinity()) {
    chartA = false;
    state = 0.0;
    offset = (lambda > 0.0) ? phi0 + kTwoPi : phi0;
  } else {
    double r = start.value();
    if (std::abs(r) <= 3.0) {
      chartA = true;
      state = r;
      offset = phi0 - (-M_PI + 2.0 * std::atan(r));
    } else {
      chartA = false;
      state = -1.0 / r;
      double local = 2.0 * std::atan(state) + (state > 0.0 ? -kTwoPi : 0.0);
      offset = phi0 - local;
    }
  }

  for (size_t i = 0; i < path.cells(); ++i) {
    double t = path.grid[i];
    const double t_cell_end = path.grid[i + 1];
    double f = path.weight[i];
    auto xy = [&](double tt) { return interp_cell(path, i, tt); };
    auto rhsA = [&](double tt, double r) {
      PlanePoint p = xy(tt);
      double dx = p.x - r;
      return lambda * f * (dx * dx + p.y * p.y) / p.y;
    };
    auto rhsB = [&](double tt, double w) {
      PlanePoint p = xy(tt);
      double u = 1.0 + p.x * w;
      return lambda * f * (u * u + p.y * p.y * w * w) / p.y;
    };
    while (t < t_cell_end) {
      // Integrate in short spans so chart switches and zero crossings of w
      // are resolved; the spans shrink automatically near fast rotation.
      PlanePoint p = xy(t);
      double reach = std::abs(p.x) + 3.0;
      double rate = std::abs(lambda) * f * (reach * reach + p.y * p.y + 1.0) / p.y + 1.0;
      double span = std::min(t_cell_end - t, 0.2 / rate);
      double t_next = std::min(t_cell_end, t + span);
      if (chartA) {
        state = rk45(rhsA, t, t_next, state, cfg.ode_rel_tol, cfg.ode_abs_tol);
        if (std::abs(state) > 3.0) {
          state = -1.0 / state;
          chartA = false;
        }
      } else {
        double before = state;
        state = rk45(rhsB, t, t_next, state, cfg.ode_rel_tol, cfg.ode_abs_tol);
        if (before != 0.0 && state != 0.0 && std::signbit(before) != std::signbit(state))
          offset += (state > before) ? kTwoPi : -kTwoPi;
        if (std::abs(state) > 0.5) {
          state = -1.0 / state;
          chartA = true;
        }
      }
      t = t_next;
    }
    double local = chartA ? (-M_PI + 2.0 * std::atan(state))
                          : (2.0 * std::atan(state) + (state > 0.0 ? -kTwoPi : 0.0));
    if (std::abs(local + offset - phi0) > cfg.max_winding * kTwoPi)
      throw WindingGuardExceeded("phase_forward_half_plane: winding guard exceeded");
  }
  double local = chartA ? (-M_PI + 2.0 * std::atan(state))
                        : (2.0 * std::atan(state) + (state > 0.0 ? -kTwoPi : 0.0));
  return local + offset;
}

}  // namespace carousel
