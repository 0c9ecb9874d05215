#include "rollkit/horoball.hpp"

#include <cmath>
#include <limits>

namespace rollkit {

namespace {

void require_hyperbolic(const Curvature& c) {
  if (c.sign() >= 0) fail(ErrorCode::kDomain, "Busemann requires negative curvature");
}

}  // namespace

BusemannRay make_busemann_ray(const TangentVector& direction) {
  const Curvature& c = direction.base.curvature;
  require_hyperbolic(c);
  const double len = norm(direction);
  if (!(len > 0.0)) fail(ErrorCode::kDomain, "ray direction must be nonzero");
  BusemannRay ray;
  ray.base = direction.base;
  ray.dir = direction.vec / len;
  ray.ideal = c.scale() * ray.base.coords + ray.dir;
  return ray;
}

ModelPoint ray_point(const BusemannRay& ray, double t) { return exp_map({ray.base, ray.dir}, t); }

double busemann_closed_form(const BusemannRay& ray, const ModelPoint& q) {
  const Curvature& c = ray.base.curvature;
  require_hyperbolic(c);
  if (!(q.curvature == c)) fail(ErrorCode::kInvalidInput, "mismatched curvature tags");
  const double k = c.scale();
  return -std::log(-k * ambient_dot(c, q.coords, ray.ideal)) / k;
}

BusemannLimit busemann_by_limit(const BusemannRay& ray, const ModelPoint& q, double t_max, int steps) {
  require_hyperbolic(ray.base.curvature);
  if (steps < 2 || !(t_max > 0.0)) fail(ErrorCode::kInvalidInput, "busemann limit needs t_max > 0 and >= 2 steps");
  BusemannLimit r;
  for (int k = 0; k < steps; ++k) {
    const double t = t_max * std::ldexp(1.0, k - (steps - 1));
    r.ts.push_back(t);
    r.values.push_back(t - distance(q, ray_point(ray, t)));
  }
  r.value = r.values.back();
  r.increment = r.values.back() - r.values[r.values.size() - 2];
  return r;
}

HoroballReport verify_horoball_rolling(const BodySpec& body, double lambda, const ConvexityCertificate& certificate,
                                       const std::vector<Params>& seeds, double tol, bool reversed) {
  const Curvature& c = body.curvature();
  require_hyperbolic(c);
  if (!(lambda >= c.scale())) fail(ErrorCode::kDomain, "horoball constraints violated (lambda < sqrt(-c))");
  if (!certificate.passed || certificate.lambda < lambda) {
    fail(ErrorCode::kCertification, "body not certified lambda-convex");
  }
  HoroballReport out;
  out.lambda = lambda;
  out.reversed = reversed;
  out.min_b = std::numeric_limits<double>::infinity();
  out.max_b_at_seed = -std::numeric_limits<double>::infinity();
  const Grid& g = body.grid();
  std::vector<ModelPoint> pts;
  for (const auto& u : g.params) pts.push_back(body.point(u));
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const CurvatureSample s = curvature_sample(body, seeds[k]);
    const Vec dir = reversed ? Vec(-s.inward_normal.vec) : s.inward_normal.vec;
    const BusemannRay ray = make_busemann_ray({s.point, dir});
    HoroballSeedResult r;
    r.seed_index = k;
    r.seed = seeds[k];
    r.min_b = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double b = busemann_closed_form(ray, pts[i]);
      if (b < r.min_b) r.min_b = b, r.argmin = i;
    }
    r.b_at_seed = busemann_closed_form(ray, s.point);
    r.passed = r.min_b >= -tol;
    out.min_b = std::min(out.min_b, r.min_b);
    out.max_b_at_seed = std::max(out.max_b_at_seed, std::abs(r.b_at_seed));
    out.seeds.push_back(r);
  }
  out.passed = !out.seeds.empty();
  for (const auto& r : out.seeds) out.passed = out.passed && r.passed;
  return out;
}

std::vector<ModelPoint> horocycle(const BusemannRay& ray, const Vec& across, double level, double half_width,
                                  int samples) {
  const Curvature& c = ray.base.curvature;
  require_hyperbolic(c);
  const double k = c.scale();
  const ModelPoint y0 = ray_point(ray, level);
  // Work on the unit hyperboloid: h(tau) = y + tau w + tau^2 / 2 xi', <y, xi'> = -1.
  const Vec y = k * y0.coords;
  Vec w = parallel_transport(ray.base, y0, across);
  const Vec along = parallel_transport(ray.base, y0, ray.dir);
  w -= ambient_dot(c, w, along) * along;
  w /= ambient_norm(c, w);
  const Vec xi = ray.ideal / (-ambient_dot(c, y, ray.ideal));
  std::vector<ModelPoint> out;
  for (int i = 0; i < samples; ++i) {
    const double tau = k * half_width * (2.0 * i / std::max(1, samples - 1) - 1.0);
    out.push_back(project_to_model(c, (y + tau * w + 0.5 * tau * tau * xi) / k));
  }
  return out;
}

}  // namespace rollkit
