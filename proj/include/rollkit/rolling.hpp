#pragma once

// Ball-rolling verification for lambda-convex bodies in M(c): inclusion in the
// tangent ball of radius R_lambda, contact-set rigidity probe, diameter and
// volume comparison, and the two-ball hull counterexample for the dual statement.

#include <string>
#include <vector>

#include "rollkit/convex_body.hpp"

namespace rollkit {

struct RollingOptions {
  double tol = 1e-6;
  double contact_tol_rel = 1e-5;   // contact band, relative to R_lambda
  double key_epsilon_rel = 0.01;   // interior offset for the key-inequality diagnostic
  std::size_t key_samples = 64;    // boundary points per seed for that diagnostic
};

struct RollingResult {
  std::size_t seed_index = 0;
  Params seed;
  ModelPoint center;                 // exp_s(R_lambda nu(s))
  std::vector<double> margins;       // R_lambda - dist(center, q) per grid point
  double min_margin = 0.0;
  std::size_t argmin = 0;
  std::vector<std::size_t> contact_set;
  // Largest |center p| + |pq| - R_lambda over the sampled interior points p.
  double key_inequality_excess = 0.0;
  // min over grid points q != seed of 2 (R - |center q|) / |seed q|^2: positive
  // iff the boundary separates from the ball at second order away from the seed.
  double off_seed_normalized_margin = 0.0;
  bool passed = false;
};

// Seeds: `count` grid points spread evenly over the grid order.
std::vector<Params> spread_seeds(const BodySpec& body, std::size_t count);

std::vector<RollingResult> verify_ball_rolling(const BodySpec& body, double lambda,
                                               const ConvexityCertificate& certificate,
                                               const std::vector<Params>& seeds, const RollingOptions& options = {});

enum class RigidityAlternative { kNone, kContactCone, kFullContact };  // none, (ii), (i)
std::string to_string(RigidityAlternative a);

struct RigidityProbe {
  RigidityAlternative alternative = RigidityAlternative::kNone;
  std::size_t contacts = 0;
  // min over unit w of max_i -<w, v_i>: > 0 means no closed half-space holds all contacts.
  double separation_value = 0.0;
  double max_angular_gap = 0.0;  // m = 2 only
};

RigidityProbe rigidity_probe(const BodySpec& body, const RollingResult& result, double half_space_tol = 1e-9,
                             double seed_cone = 1e-2);

struct DiameterCheck {
  double diameter = 0.0;
  double bound = 0.0;         // 2 R_lambda
  double margin = 0.0;        // bound - diameter
  double model_bound = 0.0;   // pi / sqrt(c) for c > 0, +inf otherwise
  double model_margin = 0.0;
  std::size_t i = 0, j = 0;   // grid indices of the extremal pair
  int resolution = 0;
  bool passed = false;
};
// Max pairwise distance over a grid of the given resolution (0: body default).
DiameterCheck verify_diameter(const BodySpec& body, double lambda, double tol, int resolution = 0);

struct VolumeCheck {
  double volume = 0.0;
  double boundary_measure = 0.0;
  double ball_volume = 0.0;
  double sphere_area = 0.0;
  double volume_margin_rel = 0.0;    // 1 - volume / ball_volume
  double boundary_margin_rel = 0.0;  // 1 - measure / sphere_area
  double volume_error = 0.0;         // |V_N - V_{N/2}| / V_N
  double boundary_error = 0.0;
  bool passed = false;
};
// Enclosed volume in geodesic polar coordinates about the body witness and boundary
// measure from the first fundamental form; throws if the halved-grid estimate
// disagrees by more than quad_tol (relative).
VolumeCheck verify_volume(const BodySpec& body, double lambda, double tol_rel, double quad_tol = 1e-8);

struct EnclosedMeasure {
  double volume = 0.0;
  double boundary = 0.0;
};
EnclosedMeasure enclosed_measure(const BodySpec& body, const Grid& grid);

struct CounterexampleReport {
  double radius = 0.0;          // R_lambda = ball radius
  double separation = 0.0;
  ModelPoint tangent_point;
  ModelPoint ball_center;
  double penetration = 0.0;     // max(0, R - min_q dist(center, q))
  std::size_t deepest = 0;      // grid index of the deepest boundary point
  double tolerance = 0.0;
  bool confirmed = false;       // penetration > tolerance
};

CounterexampleReport counterexample_two_ball_hull(const Curvature& c, double lambda, double separation,
                                                  double smoothing, double tol, int resolution = 0);
CounterexampleReport tangent_ball_penetration(const BodySpec& hull, double radius, double tol);

}  // namespace rollkit
