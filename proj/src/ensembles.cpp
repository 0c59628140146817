#include "carousel/ensembles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "carousel/errors.hpp"
#include "carousel/rng.hpp"

namespace carousel {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTailRel = 1e-8;
constexpr size_t kMaxExtensionSteps = 50'000'000;

double beta_1s_sample(Rng& rng, double s) {
  // X ~ Beta(1, s): F^{-1}(u) = 1 - (1-u)^{1/s}
  return 1.0 - std::pow(1.0 - rng.uniform(), 1.0 / s);
}

// Envelope exponent bound for sup_{|z|=r} 2 Re(conj(delta) log(1-z)).
double shell_log_envelope(double r, cplx delta) {
  double re = delta.real(), im = delta.imag();
  double radial = (re >= 0.0) ? re * std::log1p(r) : re * std::log1p(-r);
  return 2.0 * (radial + std::abs(im) * std::asin(std::min(r, 1.0)));
}

double log_weight(cplx z, cplx delta) {
  cplx one_minus = 1.0 - z;
  return 2.0 * (delta.real() * std::log(std::abs(one_minus)) +
                delta.imag() * std::arg(one_minus));
}

}  // namespace

AffineParams sine_affine_row(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("sine: beta > 0 required");
  double s = 2.0 / std::sqrt(beta);
  return {s, s, 0.0, 0.0};
}

AffineParams bessel_affine_row(double beta, double a) {
  if (!(beta > 0.0) || !(a > -1.0)) throw std::invalid_argument("bessel: beta > 0, a > -1");
  return {std::sqrt(8.0 / beta), 0.0, (2.0 * a + 1.0) - 4.0 / beta, 0.0};
}

AffineParams hua_pickrell_affine_row(double beta, cplx delta) {
  if (!(beta > 0.0) || !(delta.real() > -0.5))
    throw std::invalid_argument("hua-pickrell: beta > 0, Re delta > -1/2");
  double s = 2.0 / std::sqrt(beta);
  return {s, s, -4.0 / beta * delta.real(), 4.0 / beta * delta.imag()};
}

namespace {

// time_rate 0: the operator runs in the driving clock itself.
// time_rate 1: the operator runs in t = 1 - e^{-s}; cell averages of R are
// taken with the Jacobian weight e^{-s}.
SdePath compute_affine_path(const AffineParams& p, double horizon, const GridSpec& grid,
                            std::shared_ptr<const NoiseRecord> rec, double time_rate) {
  const size_t nominal = grid.cells * grid.substeps;
  const double dt = horizon / double(nominal);
  const double drift = p.gamma1 - 0.5 * p.alpha1 * p.alpha1;
  const size_t total_cells = rec->steps() / grid.substeps;

  SdePath out;
  out.record = rec;
  out.s.resize(total_cells + 1);
  for (size_t i = 0; i <= total_cells; ++i) out.s[i] = dt * double(i * grid.substeps);
  out.x.reserve(total_cells);
  out.y.reserve(total_cells);
  out.f.reserve(total_cells);

  // Per-cell averages of the entries of 2R = (1/y) [[1,-x],[-x,x^2+y^2]]
  // in the operator clock.
  double acc_a = 0.0, acc_b = 0.0, acc_c = 0.0, acc_w = 0.0;
  double x0 = 0.0;
  double b1 = 0.0, x = 0.0;
  for (size_t j = 0; j <= rec->steps(); ++j) {
    double y = std::exp(drift * (dt * double(j)) + p.alpha1 * b1);
    if (j < total_cells * grid.substeps) {
      // Entries are accumulated about the cell-start abscissa x0; the
      // determinant is shift invariant and the centering avoids the
      // cancellation of a c - b^2 when |x| is large against y.
      if (j % grid.substeps == 0) x0 = x;
      double w = std::exp(-time_rate * dt * double(j));
      double dx = x - x0;
      acc_a += w / y;
      acc_b += w * dx / y;
      acc_c += w * (dx * dx + y * y) / y;
      acc_w += w;
      if ((j + 1) % grid.substeps == 0) {
        double a = acc_a / acc_w;
        double bm = acc_b / acc_w;
        double cm = acc_c / acc_w;
        double det = std::sqrt(std::max(a * cm - bm * bm, 1e-300));
        out.x.push_back(x0 + bm / a);
        out.y.push_back(det / a);
        out.f.push_back(0.5 * det);
        acc_a = acc_b = acc_c = acc_w = 0.0;
      }
    }
    if (j == nominal) {
      out.x_end = x;
      out.y_end = y;
    }
    if (j == rec->steps()) {
      out.q = x;
      double d = p.decay_rate();
      if (p.alpha2 == 0.0 && p.gamma2 == 0.0)
        out.q_uncertainty = 0.0;
      else if (d > 0.0)
        out.q_uncertainty =
            6.0 * y * (std::abs(p.alpha2) / std::sqrt(2.0 * d) + std::abs(p.gamma2) / d);
      else {
        out.q = std::numeric_limits<double>::quiet_NaN();
        out.q_uncertainty = std::numeric_limits<double>::infinity();
      }
      break;
    }
    x += y * (p.gamma2 * dt + p.alpha2 * rec->db2[j]);
    b1 += rec->db1[j];
  }
  return out;
}

}  // namespace

SdePath affine_bm_path(const AffineParams& p, double horizon, const GridSpec& grid,
                       uint64_t seed, double time_rate) {
  const size_t nominal = grid.cells * grid.substeps;
  const double dt = horizon / double(nominal);
  const double drift = p.gamma1 - 0.5 * p.alpha1 * p.alpha1;
  const double d = p.decay_rate();
  const bool wants_q = (p.alpha2 != 0.0 || p.gamma2 != 0.0);

  auto rec = std::make_shared<NoiseRecord>();
  rec->seed = seed;
  rec->dt = dt;
  rec->db1.reserve(nominal);
  rec->db2.reserve(nominal);
  Rng rng(seed);
  const double sd = std::sqrt(dt);

  double b1 = 0.0, x = 0.0, y = 1.0;
  size_t j = 0;
  auto step = [&] {
    y = std::exp(drift * (dt * double(j)) + p.alpha1 * b1);
    double db1 = sd * rng.normal();
    double db2 = sd * rng.normal();
    rec->db1.push_back(db1);
    rec->db2.push_back(db2);
    x += y * (p.gamma2 * dt + p.alpha2 * db2);
    b1 += db1;
    ++j;
  };
  for (size_t i = 0; i < nominal; ++i) step();

  auto y_now = [&] { return std::exp(drift * (dt * double(j)) + p.alpha1 * b1); };
  if (wants_q && d > 0.0) {
    auto tail_bound = [&] {
      return 6.0 * y_now() *
             (std::abs(p.alpha2) / std::sqrt(2.0 * d) + std::abs(p.gamma2) / d);
    };
    while (tail_bound() > kTailRel * std::max(1.0, std::abs(x))) {
      for (size_t s = 0; s < grid.substeps; ++s) step();
      if (j > kMaxExtensionSteps)
        throw TruncationNotConverged("affine_bm_path: boundary limit tail did not converge");
    }
  }
  // Time-changed operators keep sampling until the path has pinned to the
  // boundary; truncating earlier leaves the terminal phase visibly moving.
  if (time_rate > 0.0 && d > 0.0) {
    const size_t cap = j + 3 * nominal;
    while (y_now() > 1e-5 && j < cap) {
      for (size_t s = 0; s < grid.substeps; ++s) step();
    }
  }
  return compute_affine_path(p, horizon, grid, rec, time_rate);
}

SdePath affine_bm_path_replay(const AffineParams& p, double horizon, const GridSpec& grid,
                              std::shared_ptr<const NoiseRecord> record, double time_rate) {
  if (!record || record->steps() < grid.cells * grid.substeps || !record->two_component())
    throw std::invalid_argument("affine_bm_path_replay: record does not cover the grid");
  return compute_affine_path(p, horizon, grid, std::move(record), time_rate);
}

VerblunskyCoefficients circular_beta_coeffs(size_t n, double beta, uint64_t seed) {
  if (n < 1 || !(beta > 0.0)) throw std::invalid_argument("circular_beta_coeffs: n >= 1, beta > 0");
  Rng rng(seed);
  VerblunskyCoefficients out;
  out.alpha.reserve(n);
  for (size_t k = 0; k + 1 < n; ++k) {
    double r = std::sqrt(beta_1s_sample(rng, circular_beta_second_param(n, k, beta)));
    out.alpha.push_back(std::polar(r, rng.uniform_angle()));
  }
  out.alpha.push_back(std::polar(1.0, rng.uniform_angle()));
  return out;
}

double circular_beta_second_param(size_t n, size_t k, double beta) {
  return 0.5 * beta * double(n - k - 1);
}

DeformedVerblunsky hua_pickrell_coeffs(size_t n, double beta, cplx delta, uint64_t seed) {
  if (n < 1 || !(beta > 0.0) || !(delta.real() > -0.5))
    throw std::invalid_argument("hua_pickrell_coeffs: n >= 1, beta > 0, Re delta > -1/2");
  Rng rng(seed);
  const size_t max_attempts = 200000;
  DeformedVerblunsky out;
  out.gamma.reserve(n);
  for (size_t k = 0; k + 1 < n; ++k) {
    double s = circular_beta_second_param(n, k, beta);
    cplx accepted;
    bool ok = false;
    for (size_t attempt = 0; attempt < max_attempts; ++attempt) {
      double r = std::sqrt(beta_1s_sample(rng, s));
      cplx z = std::polar(r, rng.uniform_angle());
      double log_u = std::log(std::max(rng.uniform(), 1e-300));
      if (log_u <= log_weight(z, delta) - shell_log_envelope(r, delta)) {
        accepted = z;
        ok = true;
        break;
      }
    }
    if (!ok) throw RejectionStall("hua_pickrell_coeffs: interior rejection stalled");
    out.gamma.push_back(accepted);
  }
  // Final coefficient on the unit circle with density ~ |(1-z)^{conj delta}|^2.
  const double re = delta.real(), im = delta.imag();
  bool ok = false;
  for (size_t attempt = 0; attempt < max_attempts; ++attempt) {
    double theta, log_ratio;
    if (re >= 0.0) {
      theta = -kPi + rng.uniform_angle();
      double log_env = 2.0 * (re * std::log(2.0) + std::abs(im) * 0.5 * kPi);
      log_ratio = log_weight(std::polar(1.0, theta), delta) - log_env;
    } else {
      // Proposal |theta| ~ pi u^{1/(2 Re delta + 1)} matches the singularity
      // of |1 - e^{i theta}|^{2 Re delta} at 0.
      double p0 = 2.0 * re + 1.0;
      double mag = kPi * std::pow(rng.uniform(), 1.0 / p0);
      theta = (rng.uniform() < 0.5) ? mag : -mag;
      double base = 2.0 * std::sin(0.5 * mag) / mag;  // in [2/pi, 1]
      double log_env = 2.0 * re * std::log(2.0 / kPi) + std::abs(im) * kPi;
      log_ratio = 2.0 * re * std::log(base) +
                  2.0 * im * std::arg(1.0 - std::polar(1.0, theta)) - log_env;
    }
    if (std::log(std::max(rng.uniform(), 1e-300)) <= log_ratio) {
      out.gamma.push_back(std::polar(1.0, theta));
      ok = true;
      break;
    }
  }
  if (!ok) throw RejectionStall("hua_pickrell_coeffs: boundary rejection stalled");
  out.validate();
  return out;
}

namespace {

// Log-time-changed operator Dir(x+iy, infinity, q) on [0,1) from an affine
// path sampled in the driving clock s = -log(1-t).
DiracOperator log_time_operator(const SdePath& path, EndpointClass rule, double y_floor) {
  if (!std::isfinite(path.q))
    throw NumericError("log_time_operator: path has no boundary limit");
  size_t m = path.x.size();
  for (size_t j = 0; j < path.x.size(); ++j)
    if (path.y[j] < y_floor || path.y[j] > 1.0 / y_floor) {
      m = std::max<size_t>(j, 32);
      break;
    }
  m = std::min(m, path.x.size());
  // t = 1 - e^{-s} saturates in doubles near s ~ 36; keep the grid strictly
  // increasing.
  for (size_t j = 1; j <= m; ++j)
    if (!(-std::expm1(-path.s[j]) > -std::expm1(-path.s[j - 1]))) {
      m = j - 1;
      break;
    }
  DrivingPath dp;
  dp.grid.resize(m + 1);
  dp.values.reserve(m);
  dp.weight.assign(path.f.begin(), path.f.begin() + m);
  for (size_t j = 0; j <= m; ++j) dp.grid[j] = -std::expm1(-path.s[j]);
  for (size_t j = 0; j < m; ++j) dp.values.push_back({path.x[j], path.y[j]});
  dp.horizon = 1.0;
  dp.boundary_limit = BoundaryPoint::real(path.q);
  dp.tail_rule = rule;
  return DiracOperator::make(std::move(dp), BoundaryCondition::from_point(BoundaryPoint::infinity()),
                             BoundaryCondition::from_point(BoundaryPoint::real(path.q)));
}

}  // namespace

DiracOperator sine_beta_operator(double beta, const GridSpec& grid, uint64_t seed) {
  double horizon = -std::log(grid.eps);
  SdePath path = affine_bm_path(sine_affine_row(beta), horizon, grid, seed, 1.0);
  return log_time_operator(path, beta > 2.0 ? EndpointClass::LimitCircle
                                            : EndpointClass::LimitPoint,
                           grid.y_floor);
}

DiracOperator hua_pickrell_operator(double beta, cplx delta, const GridSpec& grid,
                                    uint64_t seed) {
  double horizon = -std::log(grid.eps);
  SdePath path = affine_bm_path(hua_pickrell_affine_row(beta, delta), horizon, grid, seed, 1.0);
  bool circle = delta.real() + 0.5 < 0.25 * beta;
  return log_time_operator(path, circle ? EndpointClass::LimitCircle : EndpointClass::LimitPoint,
                           grid.y_floor);
}

DiracOperator schrodinger_operator(double nu, const GridSpec& grid, uint64_t seed) {
  if (!(nu > 0.0)) throw std::invalid_argument("schrodinger: nu > 0 required");
  // Standard hyperbolic Brownian motion, no time change; q comes from the
  // long-horizon extension beyond nu.
  SdePath path = affine_bm_path({1.0, 1.0, 0.0, 0.0}, nu, grid, seed);
  if (!std::isfinite(path.q)) throw NumericError("schrodinger: boundary limit failed");
  // The operator lives on [0, nu); cells sampled past nu serve only the
  // boundary limit estimate.
  const size_t m = std::min(grid.cells, path.x.size());
  DrivingPath dp;
  dp.grid.assign(path.s.begin(), path.s.begin() + m + 1);
  dp.values.reserve(m);
  dp.weight.assign(path.f.begin(), path.f.begin() + m);
  for (size_t j = 0; j < m; ++j) dp.values.push_back({path.x[j], path.y[j]});
  dp.horizon = nu;
  dp.boundary_limit = BoundaryPoint::real(path.q);
  dp.tail_rule = EndpointClass::LimitCircle;
  return DiracOperator::make(std::move(dp), BoundaryCondition::from_point(BoundaryPoint::infinity()),
                             BoundaryCondition::from_point(BoundaryPoint::real(path.q)));
}

namespace {

BesselOperator bessel_from_record(double beta, double a, const GridSpec& grid,
                                  std::shared_ptr<const NoiseRecord> rec) {
  const double s_max = -std::log(grid.eps);
  const size_t m = grid.cells;
  const double c = 2.0 / std::sqrt(beta);
  std::vector<double> bc = rec->cumulative1();

  DrivingPath dp;
  dp.grid.resize(m + 1);
  dp.values.reserve(m);
  dp.weight.reserve(m);
  const double ds = s_max / double(m) / double(grid.substeps);
  for (size_t j = 0; j <= m; ++j) {
    dp.grid[j] = -std::expm1(-s_max * double(j) / double(m));
    if (j < m) {
      // y(t) = exp((2/sqrt(beta)) B(2 tau(t)) + (2a+1) tau(t)); the cell
      // carries the t-average of 2R = diag(1/y, y) through its unique
      // (y, f) representation.
      double acc_a = 0.0, acc_c = 0.0, acc_w = 0.0;
      for (size_t u = 0; u < grid.substeps; ++u) {
        double s = ds * double(j * grid.substeps + u);
        double y = std::exp(c * bc[j * grid.substeps + u] + (2.0 * a + 1.0) * s);
        double w = std::exp(-s);
        acc_a += w / y;
        acc_c += w * y;
        acc_w += w;
      }
      double am = acc_a / acc_w, cm = acc_c / acc_w;
      dp.values.push_back({0.0, std::sqrt(cm / am)});
      dp.weight.push_back(0.5 * std::sqrt(am * cm));
    }
  }
  // Same per-path cutoff as the bulk models, here against growing y.
  size_t cut = m;
  for (size_t j = 0; j < m; ++j)
    if (dp.values[j].y < grid.y_floor || dp.values[j].y > 1.0 / grid.y_floor) {
      cut = std::max<size_t>(j, 32);
      break;
    }
  if (cut < m) {
    dp.grid.resize(cut + 1);
    dp.values.resize(cut);
    dp.weight.resize(cut);
  }
  dp.horizon = 1.0;
  dp.boundary_limit = BoundaryPoint::infinity();
  dp.tail_rule = (a < 0.0) ? EndpointClass::LimitCircle : EndpointClass::LimitPoint;
  DiracOperator op = DiracOperator::make(
      std::move(dp), BoundaryCondition::from_point(BoundaryPoint::real(0.0)),
      BoundaryCondition::from_point(BoundaryPoint::infinity()));
  return {std::move(op), std::move(rec), beta, a};
}

}  // namespace

BesselOperator bessel_operator(double beta, double a, const GridSpec& grid, uint64_t seed) {
  if (!(beta > 0.0) || !(a > -1.0)) throw std::invalid_argument("bessel: beta > 0, a > -1");
  const double x_max = 2.0 * (-std::log(grid.eps));
  const size_t steps = grid.cells * grid.substeps;
  auto rec = std::make_shared<NoiseRecord>(
      make_noise_record(seed, x_max / double(steps), steps, false));
  return bessel_from_record(beta, a, grid, std::move(rec));
}

BesselOperator bessel_operator_replay(double beta, double a, const GridSpec& grid,
                                      std::shared_ptr<const NoiseRecord> record) {
  if (!record || record->steps() != grid.cells * grid.substeps)
    throw std::invalid_argument("bessel_operator_replay: record does not match the grid");
  return bessel_from_record(beta, a, grid, std::move(record));
}

double hard_edge_m(double x, double b_at_x, double beta, double a) {
  return std::exp(-(a + 1.0) * x - 2.0 / std::sqrt(beta) * b_at_x);
}

double hard_edge_s(double x, double b_at_x, double beta, double a) {
  return std::exp(a * x + 2.0 / std::sqrt(beta) * b_at_x);
}

std::vector<double> hard_edge_sl_oracle(const NoiseRecord& record, double beta, double a,
                                        size_t k, size_t quad_nodes) {
  if (k == 0) throw std::invalid_argument("hard_edge_sl_oracle: k >= 1");
  const double dt = record.dt;
  std::vector<double> bc = record.cumulative1();
  const size_t nrec = record.steps();

  // Cumulatives of s and m at record resolution (trapezoid rule); the node
  // weights below are exact cell integrals of the rough measure m dy.
  std::vector<double> s_cum(nrec + 1, 0.0), m_cum(nrec + 1, 0.0);
  double s_prev = hard_edge_s(0.0, bc[0], beta, a);
  double m_prev = hard_edge_m(0.0, bc[0], beta, a);
  for (size_t j = 0; j < nrec; ++j) {
    double s_next = hard_edge_s(dt * double(j + 1), bc[j + 1], beta, a);
    double m_next = hard_edge_m(dt * double(j + 1), bc[j + 1], beta, a);
    s_cum[j + 1] = s_cum[j] + 0.5 * (s_prev + s_next) * dt;
    m_cum[j + 1] = m_cum[j] + 0.5 * (m_prev + m_next) * dt;
    s_prev = s_next;
    m_prev = m_next;
  }

  auto interp = [&](const std::vector<double>& cum, double x) {
    double u = x / dt;
    size_t j = std::min(size_t(u), nrec - 1);
    double frac = u - double(j);
    return cum[j] + frac * (cum[j + 1] - cum[j]);
  };

  auto eigs = [&](double interval, size_t nodes) {
    const double h = interval / double(nodes);
    Eigen::VectorXd sqrt_w(nodes), s_at(nodes);
    for (size_t i = 0; i < nodes; ++i) {
      double x = (double(i) + 0.5) * h;
      sqrt_w[i] = std::sqrt(interp(m_cum, x + 0.5 * h) - interp(m_cum, x - 0.5 * h));
      s_at[i] = interp(s_cum, x);
    }
    Eigen::MatrixXd kernel(nodes, nodes);
    for (size_t i = 0; i < nodes; ++i)
      for (size_t j = 0; j <= i; ++j) {
        double v = sqrt_w[i] * sqrt_w[j] * s_at[j];  // S(x_min), grid ordered
        kernel(i, j) = v;
        kernel(j, i) = v;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
      double mu = solver.eigenvalues()[nodes - 1 - i];
      if (!(mu > 0.0)) throw NumericError("hard_edge_sl_oracle: kernel not positive");
      out.push_back(1.0 / mu);
    }
    return out;
  };

  // Doubling check: the half-interval result must already be close; the
  // kernel tail decays geometrically, so the residual beyond the full
  // interval is far below the observed half-to-full move.
  const double interval = record.horizon();
  std::vector<double> full = eigs(interval, quad_nodes);
  std::vector<double> half = eigs(0.5 * interval, quad_nodes / 2);
  for (size_t i = 0; i < k; ++i)
    if (std::abs(full[i] - half[i]) > 5e-2 * std::abs(full[i]))
      throw TruncationNotConverged("hard_edge_sl_oracle: eigenvalues move under interval doubling");
  return full;
}

double ks_diffusion_coefficient(double beta, double t) { return 2.0 / std::sqrt(beta * t); }

KsSample killip_stoiciu_sample(double beta, double lo, double hi, size_t mesh, uint64_t seed,
                               const KsConfig& cfg) {
  if (!(beta > 0.0) || !(lo < hi) || mesh < 2)
    throw std::invalid_argument("killip_stoiciu_sample: invalid arguments");

  // Geometric master grid from the finest eps level up to 1; the variance of
  // an Euler-Maruyama step is then ~ 4 log_step / beta uniformly in t.
  const double eps_min = cfg.eps / std::pow(2.0, cfg.levels - 1);
  std::vector<double> times{eps_min};
  while (times.back() < 1.0)
    times.push_back(std::min(1.0, times.back() * (1.0 + cfg.log_step)));
  const size_t nsteps = times.size() - 1;

  Rng noise_rng = Rng::derive(seed, 1);
  std::vector<double> db1(nsteps), db2(nsteps);
  for (size_t j = 0; j < nsteps; ++j) {
    double sd = std::sqrt(times[j + 1] - times[j]);
    db1[j] = sd * noise_rng.normal();
    db2[j] = sd * noise_rng.normal();
  }
  double theta = Rng::derive(seed, 2).uniform_angle();

  auto solve = [&](double lam, size_t start) {
    double psi = 0.0;
    for (size_t j = start; j < nsteps; ++j) {
      double t = times[j];
      double c = ks_diffusion_coefficient(beta, t);
      psi += lam * (times[j + 1] - t) +
             c * ((std::cos(psi) - 1.0) * db1[j] + std::sin(psi) * db2[j]);
    }
    return psi;
  };

  auto start_index = [&](double eps) {
    size_t idx = 0;
    while (idx < nsteps && times[idx] < eps * (1.0 - 1e-12)) ++idx;
    return idx;
  };

  KsSample out;
  out.theta = theta;
  out.lambda_mesh.resize(mesh);
  for (size_t i = 0; i < mesh; ++i)
    out.lambda_mesh[i] = lo + (hi - lo) * double(i) / double(mesh - 1);

  std::vector<double> prev_points, prev_psi;
  for (int level = 0; level < cfg.levels; ++level) {
    size_t start = start_index(cfg.eps / std::pow(2.0, level));
    std::vector<double> psi(mesh);
    for (size_t i = 0; i < mesh; ++i) psi[i] = solve(out.lambda_mesh[i], start);

    if (!prev_psi.empty()) {
      for (size_t i = 0; i < mesh; ++i) {
        double lam = out.lambda_mesh[i];
        double v = (lam > 0.0) ? prev_psi[i] - psi[i] : psi[i] - prev_psi[i];
        out.max_coupling_violation = std::max(out.max_coupling_violation, v);
      }
      if (out.max_coupling_violation > cfg.coupling_slack)
        throw NumericError("killip_stoiciu_sample: eps coupling monotonicity violated");
    }

    std::vector<double> points;
    for (size_t i = 0; i + 1 < mesh; ++i) {
      double ja = psi[i], jb = psi[i + 1];
      if (!(jb > ja)) continue;
      long kmin = long(std::ceil((ja - theta) / kTwoPi - 1e-12));
      long kmax = long(std::floor((jb - theta) / kTwoPi + 1e-12));
      for (long kk = kmin; kk <= kmax; ++kk) {
        double level_val = theta + kTwoPi * double(kk);
        if (level_val <= ja || level_val > jb) continue;
        double a = out.lambda_mesh[i], b = out.lambda_mesh[i + 1];
        while (b - a > 1e-7) {
          double mid = 0.5 * (a + b);
          (solve(mid, start) < level_val ? a : b) = mid;
        }
        points.push_back(0.5 * (a + b));
      }
    }
    std::sort(points.begin(), points.end());
    out.level_points.push_back(points);

    bool stable = false;
    if (level > 0) {
      // Match interior points between the eps levels.  Points may drift
      // across the window edges, and one tangent pair is tolerated: where
      // psi grazes a level tangentially the crossing pair is an
      // ill-conditioned Euler-Maruyama artifact that wanders (or flickers)
      // without affecting the rest of the set.
      int violations = 0;
      double edge = std::max(16.0 * cfg.set_tol, 1e-9 * (hi - lo));
      auto interior = [&](double x) { return std::min(x - lo, hi - x) > edge; };
      size_t i = 0, j = 0;
      while (i < prev_points.size() && j < points.size()) {
        if (std::abs(prev_points[i] - points[j]) <= cfg.set_tol) {
          ++i;
          ++j;
        } else if (prev_points[i] < points[j]) {
          if (interior(prev_points[i])) ++violations;
          ++i;
        } else {
          if (interior(points[j])) ++violations;
          ++j;
        }
      }
      for (; i < prev_points.size(); ++i)
        if (interior(prev_points[i])) ++violations;
      for (; j < points.size(); ++j)
        if (interior(points[j])) ++violations;
      stable = violations <= 2;
    }
    if (stable || level == cfg.levels - 1) {
      if (!stable && level == cfg.levels - 1 && cfg.levels > 1)
        throw TruncationNotConverged("killip_stoiciu_sample: point set did not stabilize in eps");
      out.psi_at_one = std::move(psi);
      out.points = std::move(points);
      return out;
    }
    prev_points = std::move(points);
    prev_psi = std::move(psi);
  }
  return out;
}

NoiseRecord airy_noise(double horizon, uint64_t seed, double dt) {
  size_t steps = size_t(std::ceil(horizon / dt));
  return make_noise_record(seed, dt, steps, false);
}

AiryCount airy_counting(double beta, double lambda, const NoiseRecord& record) {
  if (!(beta > 0.0)) throw std::invalid_argument("airy_counting: beta > 0 required");
  const double dt = record.dt;
  const double c = 2.0 / std::sqrt(beta);
  const size_t n = record.steps();
  const size_t half = n / 2;

  // u1, u2 solve the soft-edge equation at spectral value 0 with data (1,0)
  // and (0,1); v is the canonical solution at lambda transported to the
  // (v, v') frame, Dirichlet data (0,1).  Eigenvalues below lambda are the
  // passages of v through zero; passages of W = u1 v' - u1' v through zero
  // are the blow-ups of r_lambda = y1/y2.
  double u1 = 1.0, u1p = 0.0, u2 = 0.0, u2p = 1.0, v = 0.0, vp = 1.0;
  long count = 0, blowups = 0, count_half = 0;
  double w_prev = u1 * vp - u1p * v;
  for (size_t j = 0; j < n; ++j) {
    double t = dt * double(j);
    double dxi = t * dt + c * record.db1[j];
    u1p += u1 * dxi;
    u1 += u1p * dt;
    u2p += u2 * dxi;
    u2 += u2p * dt;
    double v_prev = v;
    vp += v * (dxi - lambda * dt);
    v += vp * dt;
    if (v_prev != 0.0 && v != 0.0 && std::signbit(v_prev) != std::signbit(v)) ++count;
    double w = u1 * vp - u1p * v;
    if (w_prev != 0.0 && w != 0.0 && std::signbit(w_prev) != std::signbit(w)) ++blowups;
    w_prev = w;
    if (j + 1 == half) count_half = count;
    double mag = std::max({std::abs(u1), std::abs(u1p), std::abs(u2), std::abs(u2p)});
    if (mag > 1e100) {
      u1 *= 1e-100;
      u1p *= 1e-100;
      u2 *= 1e-100;
      u2p *= 1e-100;
    }
    double magv = std::max(std::abs(v), std::abs(vp));
    if (magv > 1e100) {
      v *= 1e-100;
      vp *= 1e-100;
      w_prev *= 1e-100;
    }
  }
  if (count != count_half)
    throw HorizonTooShort("airy_counting: count changes when the horizon doubles");
  return {count, blowups, record.horizon()};
}

AiryCount airy_counting(double beta, double lambda, uint64_t seed, double horizon) {
  if (horizon <= 0.0) horizon = std::max(10.0, lambda + 8.0);
  NoiseRecord rec = airy_noise(2.0 * horizon, seed);
  return airy_counting(beta, lambda, rec);
}

long airy_riccati_count(double beta, double lambda, const NoiseRecord& record) {
  if (!(beta > 0.0)) throw std::invalid_argument("airy_riccati_count: beta > 0 required");
  const double dt = record.dt;
  const double c = 2.0 / std::sqrt(beta);
  // Dirichlet start p(0+) = +infinity, i.e. q = 1/p = 0 moving up.
  bool p_chart = false;
  double state = 0.0;
  double prev_q_sign = 0.0;
  long count = 0;
  for (size_t j = 0; j < record.steps(); ++j) {
    double t = dt * double(j);
    double db = record.db1[j];
    if (p_chart) {
      state += (t - lambda - state * state) * dt + c * db;
      if (std::abs(state) > 1.2) {
        prev_q_sign = (1.0 / state > 0.0) ? 1.0 : -1.0;
        state = 1.0 / state;
        p_chart = false;
      }
    } else {
      // q = 1/p:  dq = (1 - (t - lambda) q^2) dt + (4/beta) q^3 dt - c q^2 dB
      state += (1.0 - (t - lambda) * state * state) * dt +
               (4.0 / beta) * state * state * state * dt - c * state * state * db;
      double sign = (state > 0.0) ? 1.0 : (state < 0.0 ? -1.0 : 0.0);
      if (prev_q_sign < 0.0 && sign > 0.0) ++count;  // p exploded to -infinity
      if (sign != 0.0) prev_q_sign = sign;
      if (std::abs(state) > 1.2) {
        state = 1.0 / state;
        p_chart = true;
      }
    }
  }
  return count;
}

}  // namespace carousel
