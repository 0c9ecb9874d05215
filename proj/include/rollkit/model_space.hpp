#pragma once

// Closed-form geometry of the constant-curvature model spaces M(c).
//
// Points of M(c) are stored in an ambient embedding:
//   c > 0  sphere of radius 1/sqrt(c) in R^{m+1} (Euclidean form)
//   c = 0  R^m
//   c < 0  upper sheet of <x,x> = 1/c in Minkowski R^{m,1}, time coordinate first
// Every formula is written once for the canonical curvatures {-1, 0, +1} and
// rescaled with kappa = sqrt(|c|).

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "rollkit/error.hpp"

namespace rollkit {

inline constexpr int kMaxAmbient = 8;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;

class Curvature {
 public:
  Curvature() = default;
  explicit Curvature(double c);

  double value() const { return c_; }
  int sign() const { return sign_; }
  // kappa = sqrt(|c|); 1 for c = 0 so that rescaling is a no-op.
  double scale() const { return kappa_; }
  bool operator==(const Curvature& o) const { return c_ == o.c_; }

 private:
  double c_ = 0.0;
  int sign_ = 0;
  double kappa_ = 1.0;
};

// Ambient bilinear form: Euclidean for c >= 0, Minkowski (-,+,...,+) for c < 0.
double ambient_dot(const Curvature& c, const Vec& a, const Vec& b);
double ambient_norm(const Curvature& c, const Vec& a);  // sqrt(max(0, <a,a>))

struct ModelPoint {
  Vec coords;
  Curvature curvature;

  int dim() const { return curvature.sign() == 0 ? int(coords.size()) : int(coords.size()) - 1; }
};

struct TangentVector {
  ModelPoint base;
  Vec vec;
};

// Builds a point after checking the embedding invariant (tolerance relative to |coords|^2).
ModelPoint make_point(const Curvature& c, const Vec& coords, double tol = 1e-12);
// Radially pulls an ambient vector back onto the model space (drift repair).
ModelPoint project_to_model(const Curvature& c, const Vec& coords);
bool satisfies_embedding(const ModelPoint& p, double tol);

// Base point used by generators: e_0 / kappa for c != 0, the origin for c = 0.
ModelPoint model_origin(const Curvature& c, int m);
// Orthonormal basis of T_p M (Gram-Schmidt of ambient unit vectors).
std::vector<Vec> tangent_frame(const ModelPoint& p);
// Removes the component of v along the position vector (identity for c = 0).
Vec project_to_tangent(const ModelPoint& p, const Vec& v);

// Generalized trigonometry.
double sn(const Curvature& c, double t);
double cs(const Curvature& c, double t);  // sn'
double ct(const Curvature& c, double t);  // sn'/sn, t in (0, pi/sqrt(c))

struct SphereConstraint {
  double lambda = 0.0;
  Curvature curvature;
  double radius = 0.0;  // R_lambda
};

// R with ct_c(R) = lambda. Throws kDomain if lambda violates the sphere constraints.
double characteristic_radius(const Curvature& c, double lambda);
SphereConstraint sphere_constraint(const Curvature& c, double lambda);
bool satisfies_sphere_constraints(const Curvature& c, double lambda);
// Largest admissible distance (pi/sqrt(c) for c > 0, +inf otherwise).
double model_diameter(const Curvature& c);

double distance(const ModelPoint& p, const ModelPoint& q);
ModelPoint exp_map(const TangentVector& v, double t = 1.0);
TangentVector log_map(const ModelPoint& p, const ModelPoint& q);
double norm(const TangentVector& v);
double angle(const TangentVector& u, const TangentVector& v);
// Parallel transport of w in T_p M to T_q M along the minimizing geodesic.
Vec parallel_transport(const ModelPoint& p, const ModelPoint& q, const Vec& w);

// Law of cosines in M(c).
double model_third_side(const Curvature& c, double a, double b, double included_angle);
// Angle between sides a and b of a triangle whose third side is `opposite`.
double model_triangle_angle(const Curvature& c, double a, double b, double opposite);

// Total measure of the unit (n)-sphere.
double unit_sphere_measure(int n);
double sphere_area(const Curvature& c, int m, double r);
double ball_volume(const Curvature& c, int m, double r);

}  // namespace rollkit
