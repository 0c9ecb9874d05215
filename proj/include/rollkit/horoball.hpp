#pragma once

// Busemann functions of geodesic rays in H^m(c) and horoball inclusion of
// lambda-convex bodies.

#include <vector>

#include "rollkit/convex_body.hpp"

namespace rollkit {

struct BusemannRay {
  ModelPoint base;
  Vec dir;    // unit tangent at base
  Vec ideal;  // null vector kappa * base + dir
};

BusemannRay make_busemann_ray(const TangentVector& direction);
// Point at signed arclength t along the ray.
ModelPoint ray_point(const BusemannRay& ray, double t);

double busemann_closed_form(const BusemannRay& ray, const ModelPoint& q);

struct BusemannLimit {
  double value = 0.0;      // t_max - dist(q, ray(t_max))
  double increment = 0.0;  // change over the last geometric step
  std::vector<double> ts, values;
};
// Evaluates t - dist(q, ray(t)) at `steps` geometrically spaced t ending at t_max.
BusemannLimit busemann_by_limit(const BusemannRay& ray, const ModelPoint& q, double t_max = 30.0, int steps = 16);

struct HoroballSeedResult {
  std::size_t seed_index = 0;
  Params seed;
  double min_b = 0.0;
  std::size_t argmin = 0;
  double b_at_seed = 0.0;
  bool passed = false;
};

struct HoroballReport {
  double lambda = 0.0;
  bool reversed = false;
  std::vector<HoroballSeedResult> seeds;
  double min_b = 0.0;  // over all seeds
  double max_b_at_seed = 0.0;
  bool passed = false;
};

// For each seed s, b of the ray from s along nu(s) (or -nu(s) when `reversed`)
// must be >= -tol on the whole grid.
HoroballReport verify_horoball_rolling(const BodySpec& body, double lambda, const ConvexityCertificate& certificate,
                                       const std::vector<Params>& seeds, double tol, bool reversed = false);

// Level set {b = level} of the ray as a polyline in the plane spanned by the
// ray and a second unit tangent `across` (m = 2 bodies).
std::vector<ModelPoint> horocycle(const BusemannRay& ray, const Vec& across, double level, double half_width,
                                  int samples);

}  // namespace rollkit
