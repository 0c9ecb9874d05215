#pragma once

// Radial angle function of a body seen from an interior origin, integral
// trajectories of the restricted distance function, the Liouville-type
// identity along them, and the radial angle comparison against the model sphere.

#include <string>
#include <vector>

#include "rollkit/convex_body.hpp"

namespace rollkit {

struct Origin {
  ModelPoint p;
  double d = 0.0;            // distance to the boundary
  Params foot;               // chart parameter of the nearest boundary point
  std::size_t foot_index = 0;
  std::size_t ties = 0;      // other grid points within 1e-12 of the minimum
};

// Grid argmin of the distance followed by a local refinement. Ties go to the
// first grid point in grid order.
Origin locate_origin(const BodySpec& body, const ModelPoint& p);

// Angle between the arrival velocity of the geodesic p -> q and -nu(q).
double radial_angle(const BodySpec& body, const ModelPoint& p, const Params& u);
double radial_angle(const CurvatureSample& sample, const ModelPoint& p);

struct GradientResiduals {
  double phi = 0.0;
  double tangential_norm = 0.0;      // |grad_Sigma d|
  double tangential_residual = 0.0;  // |grad_Sigma d| - sin(phi)
  double normal_residual = 0.0;      // <grad d, nu> + cos(phi)
};
GradientResiduals gradient_decomposition_check(const BodySpec& body, const ModelPoint& p, const Params& u);

enum class TrajectoryDirection { kIncreasing, kDecreasing };

struct TrajectorySample {
  double s = 0.0;
  double t = 0.0;
  double phi = 0.0;
  Params u;
  Vec coords;
  Params direction;  // unit chart velocity du/ds
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryDirection direction = TrajectoryDirection::kIncreasing;
  double nominal_step = 0.0;
  std::size_t uniform_samples = 0;  // samples before the first step reduction
  std::string stop_reason;          // "phi_floor", "chart_boundary" or "max_length"
};

struct TrajectoryOptions {
  double step = 1e-3;
  double phi_floor = 1e-6;
  double min_step = 1e-13;
  double max_length = 100.0;
};

Trajectory integrate_trajectory(const BodySpec& body, const ModelPoint& p, const Params& u0,
                                TrajectoryDirection direction, const TrajectoryOptions& options = {});

struct LiouvilleResult {
  double max_residual = 0.0;
  std::size_t argmax = 0;   // sample index
  std::size_t evaluated = 0;
  std::vector<double> residuals;  // aligned with samples; NaN where not evaluated
};
// Residual of k(q, X) = ct_c(t) cos(phi) + d(cos phi)/dt along the uniform-step
// part of the trajectory, with d/dt by three-point differences.
LiouvilleResult liouville_residual(const Trajectory& traj, const BodySpec& body, const ModelPoint& p);

// Radial angle at distance t on the model sphere of radius R_lambda whose
// origin sits at depth d below the surface.
double comparison_radial_angle(const Curvature& c, double lambda, double d, double t);

struct RacReport {
  double d = 0.0;
  double R_lambda = 0.0;
  double max_violation = 0.0;  // max of phi - phi_lambda over the checked points
  std::size_t argmax = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;     // grid points with t outside [d, 2R - d]
  double tolerance = 0.0;
  bool passed = false;
};
RacReport rac_check(const BodySpec& body, const ModelPoint& p, double lambda, double tol);
RacReport rac_check(const BodySpec& body, const Origin& origin, double lambda, double tol);

struct MonotonicityReport {
  double min_slope = 0.0;
  double max_abs_f = 0.0;
  std::size_t points = 0;
  double tolerance = 0.0;
  bool passed = false;
};
// Certifies that t -> (cos phi - cos phi_lambda) sn_c(t) is non-decreasing
// along the trajectory (samples thinned so that consecutive t differ by >= 1e-6).
MonotonicityReport monotonicity_certificate(const Trajectory& traj, const Curvature& c, double lambda, double d,
                                            double tol);

}  // namespace rollkit
