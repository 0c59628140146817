#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carousel/geometry.hpp"

namespace carousel {

enum class Interpolation { PiecewiseConstant, LinearInLogY };
enum class EndpointClass { LimitCircle, LimitPoint };

// Time-gridded path in the hyperbolic plane together with the weight f.
// `values[i]` and `weight[i]` belong to the cell [grid[i], grid[i+1]).
// For operators with a singular right endpoint the grid stops short of
// `horizon`; `boundary_limit` is the path's limit there and `tail_rule`
// carries the endpoint classification of the generating model.
struct DrivingPath {
  std::vector<double> grid;
  std::vector<PlanePoint> values;
  std::vector<double> weight;
  Interpolation interpolation = Interpolation::PiecewiseConstant;
  std::optional<BoundaryPoint> boundary_limit;
  std::optional<EndpointClass> tail_rule;
  double horizon = 0.0;

  size_t cells() const { return values.size(); }
  double grid_end() const { return grid.back(); }
  bool truncated() const { return grid.back() < horizon; }
  void validate() const;

  static DrivingPath constant(PlanePoint p, double f, double t_end, size_t cells = 1);
};

// Boundary condition angle phi in [0, 2pi); u is parallel to
// (cos(phi/2), -sin(phi/2))^t and the boundary point is -cot(phi/2).
struct BoundaryCondition {
  double phi = 0.0;

  static BoundaryCondition from_angle(double phi) { return {reduce_mod_2pi(phi)}; }
  static BoundaryCondition from_point(BoundaryPoint p) { return {boundary_angle(p)}; }
  Vec2 direction() const;
  BoundaryPoint point() const { return boundary_from_angle(phi); }
};

struct SolverConfig {
  double ode_rel_tol = 1e-11;
  double ode_abs_tol = 1e-13;
  double bisection_tol = 1e-10;
  // Point-set stabilization tolerance for truncation refinement on singular
  // endpoints.  Truncation convergence has no proven rate; successive
  // refinements must move the window point set by less than this.
  double truncation_tol = 5e-4;
  int truncation_levels = 4;
  // Successive truncations step the endpoint distance by this factor; in the
  // log-time models this is half a unit of the driving clock per level.
  double truncation_factor = 1.6487212707001282;
  int max_winding = 1000000;
  // Endpoint classification by grid quadrature of f/(1-|gamma|^2).
  double classification_ceiling = 1e8;
  double classification_rel_tol = 1e-3;
  double hs_ceiling = 1e12;
};

// Where a point sample came from; echoed into every serialized output.
struct Provenance {
  std::string model;
  uint64_t seed = 0;
  size_t grid_cells = 0;
  double eps = 0.0;
};

struct PointSample {
  std::vector<double> points;  // sorted
  double window_lo = 0.0;
  double window_hi = 0.0;
  Provenance provenance;
};

struct PhaseFunction {
  double lambda = 0.0;
  std::vector<double> times;    // grid times
  std::vector<double> angles;   // lifted phase at grid times, angles[0] = phi0
  double terminal() const { return angles.back(); }
};

class DiracOperator {
 public:
  // Rejects parallel boundary conditions (phi0 == phi1 mod 2pi).
  static DiracOperator make(DrivingPath path, BoundaryCondition bc0, BoundaryCondition bc1);
  // The finite-unitary pipeline can legitimately produce parallel conditions
  // (an eigen-angle at 0 puts 0 in the spectrum); this entry point allows it.
  static DiracOperator make_allowing_parallel(DrivingPath path, BoundaryCondition bc0,
                                              BoundaryCondition bc1);

  const DrivingPath& path() const { return path_; }
  BoundaryCondition bc0() const { return bc0_; }
  BoundaryCondition bc1() const { return bc1_; }
  EndpointClass endpoint_class() const { return endpoint_class_; }
  bool parallel_bc() const { return parallel_; }

 private:
  DiracOperator(DrivingPath path, BoundaryCondition bc0, BoundaryCondition bc1, bool parallel);
  DrivingPath path_;
  BoundaryCondition bc0_, bc1_;
  EndpointClass endpoint_class_;
  bool parallel_;
};

EndpointClass classify_endpoint(const DrivingPath& path, const SolverConfig& cfg = {});
inline EndpointClass classify_endpoint(const DiracOperator& op) { return op.endpoint_class(); }

PhaseFunction phase_forward(const DiracOperator& op, double lambda, const SolverConfig& cfg = {});

// sign(lambda) x (number of passages of phi1 + 2pi Z on [0, T)), terminal
// exact hits included; right-continuous in lambda.
long counting_function(const DiracOperator& op, double lambda, const SolverConfig& cfg = {});

PointSample eigenvalues(const DiracOperator& op, double lo, double hi,
                        const SolverConfig& cfg = {});

// Reverse phase function value rho_lambda(0); monotone limit of backward
// solutions started at grid prefixes when the endpoint is singular.
double phase_reverse(const DiracOperator& op, double lambda, const SolverConfig& cfg = {});

// Spectrum through the reverse phase function (rho_lambda(0) in phi0 + 2pi Z).
PointSample eigenvalues_reverse(const DiracOperator& op, double lo, double hi,
                                const SolverConfig& cfg = {});

// 2 int_0^T int_0^x u0^t R u0 u1^t R u1, with u0^t J u1 normalized to 1.
// Exact cell-by-cell for piecewise constant paths.
double hs_norm_squared(const DiracOperator& op, const SolverConfig& cfg = {});

// Driving path in Poincare disk coordinates (the conjugated operator data).
struct DiskPath {
  std::vector<double> grid;
  std::vector<DiskCoord> centers;
  std::vector<double> weight;
  double phi0 = 0.0, phi1 = 0.0;
};
DiskPath to_disk_coordinates(const DiracOperator& op);

// Phase integration in half-plane coordinates with explicit restarts at
// infinity; exists to cross-check the disk route.
double phase_forward_half_plane(const DiracOperator& op, double lambda,
                                const SolverConfig& cfg = {});

}  // namespace carousel
