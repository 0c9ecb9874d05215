#include "rollkit/model_space.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace rollkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Canonical (|c| in {0, 1}) building blocks.
double sn_canon(int sign, double x) {
  if (sign > 0) return std::sin(x);
  if (sign < 0) return std::sinh(x);
  return x;
}

double cs_canon(int sign, double x) {
  if (sign > 0) return std::cos(x);
  if (sign < 0) return std::cosh(x);
  return 1.0;
}

// S(x) = sn(x/2)^2, the "half chord" function of the law of cosines.
double half_chord(int sign, double x) {
  const double s = sn_canon(sign, 0.5 * x);
  return s * s;
}

void require_same_space(const ModelPoint& p, const ModelPoint& q) {
  if (!(p.curvature == q.curvature) || p.coords.size() != q.coords.size()) {
    fail(ErrorCode::kInvalidInput, "points belong to different model spaces");
  }
}

}  // namespace

Curvature::Curvature(double c) : c_(c) {
  if (!std::isfinite(c)) fail(ErrorCode::kDomain, "curvature must be finite");
  sign_ = (c > 0) - (c < 0);
  kappa_ = sign_ == 0 ? 1.0 : std::sqrt(std::abs(c));
}

double ambient_dot(const Curvature& c, const Vec& a, const Vec& b) {
  double s = a.dot(b);
  if (c.sign() < 0) s -= 2.0 * a[0] * b[0];
  return s;
}

double ambient_norm(const Curvature& c, const Vec& a) {
  return std::sqrt(std::max(0.0, ambient_dot(c, a, a)));
}

bool satisfies_embedding(const ModelPoint& p, double tol) {
  const Curvature& c = p.curvature;
  if (c.sign() == 0) return p.coords.allFinite();
  const double target = 1.0 / c.value();
  const double scale = std::max(std::abs(target), p.coords.squaredNorm());
  if (std::abs(ambient_dot(c, p.coords, p.coords) - target) > tol * scale) return false;
  return c.sign() > 0 || p.coords[0] > 0.0;
}

ModelPoint make_point(const Curvature& c, const Vec& coords, double tol) {
  ModelPoint p{coords, c};
  if (coords.size() < (c.sign() == 0 ? 1 : 2)) fail(ErrorCode::kInvalidInput, "point has too few coordinates");
  if (!satisfies_embedding(p, tol)) {
    fail(ErrorCode::kInvalidInput, "coordinates do not lie on the model space of curvature " +
                                       std::to_string(c.value()));
  }
  return p;
}

ModelPoint project_to_model(const Curvature& c, const Vec& coords) {
  if (c.sign() == 0) return {coords, c};
  const double q = ambient_dot(c, coords, coords);
  if (c.sign() > 0) {
    return {coords / (c.scale() * std::sqrt(q)), c};
  }
  if (q >= 0.0 || coords[0] <= 0.0) fail(ErrorCode::kDomain, "vector is not timelike future-pointing");
  return {coords / (c.scale() * std::sqrt(-q)), c};
}

ModelPoint model_origin(const Curvature& c, int m) {
  if (m < 1 || m + 1 > kMaxAmbient) fail(ErrorCode::kInvalidInput, "unsupported dimension");
  if (c.sign() == 0) return {Vec::Zero(m), c};
  Vec x = Vec::Zero(m + 1);
  x[0] = 1.0 / c.scale();
  return {x, c};
}

Vec project_to_tangent(const ModelPoint& p, const Vec& v) {
  const Curvature& c = p.curvature;
  if (c.sign() == 0) return v;
  return v - c.value() * ambient_dot(c, v, p.coords) * p.coords;
}

std::vector<Vec> tangent_frame(const ModelPoint& p) {
  const Curvature& c = p.curvature;
  const int n = int(p.coords.size());
  std::vector<Vec> frame;
  frame.reserve(p.dim());
  // Start with e_1.. so the frame at the model origin is the standard one.
  for (int k = 0; k < n && int(frame.size()) < p.dim(); ++k) {
    const int axis = (k + (c.sign() == 0 ? 0 : 1)) % n;
    Vec v = project_to_tangent(p, Vec::Unit(n, axis));
    for (const Vec& e : frame) v -= ambient_dot(c, v, e) * e;
    const double len = ambient_norm(c, v);
    if (len < 1e-8) continue;
    frame.push_back(v / len);
  }
  if (int(frame.size()) != p.dim()) fail(ErrorCode::kNumerical, "could not build tangent frame");
  return frame;
}

double sn(const Curvature& c, double t) {
  const double k = c.scale();
  return sn_canon(c.sign(), k * t) / k;
}

double cs(const Curvature& c, double t) { return cs_canon(c.sign(), c.scale() * t); }

double ct(const Curvature& c, double t) {
  if (!(t > 0.0) || (c.sign() > 0 && !(t < kPi / c.scale()))) {
    fail(ErrorCode::kDomain, "outside cotangent domain: t = " + std::to_string(t));
  }
  const double k = c.scale();
  const double x = k * t;
  switch (c.sign()) {
    case 1:
      return k * std::cos(x) / std::sin(x);
    case -1:
      return k / std::tanh(x);
    default:
      return 1.0 / t;
  }
}

bool satisfies_sphere_constraints(const Curvature& c, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) return false;
  return c.sign() >= 0 || lambda > c.scale();
}

double characteristic_radius(const Curvature& c, double lambda) {
  if (!satisfies_sphere_constraints(c, lambda)) {
    fail(ErrorCode::kDomain, "sphere constraints violated: lambda = " + std::to_string(lambda) +
                                 ", c = " + std::to_string(c.value()));
  }
  const double k = c.scale();
  double seed = 0.0;
  switch (c.sign()) {
    case 1:
      seed = std::atan(k / lambda) / k;  // arccot(lambda / k) / k
      break;
    case -1:
      seed = std::atanh(k / lambda) / k;  // arccoth(lambda / k) / k
      break;
    default:
      seed = 1.0 / lambda;
  }
  // Polish on ct(R) = lambda by bracketing bisection around the closed form.
  const double upper_limit = c.sign() > 0 ? kPi / k : std::numeric_limits<double>::infinity();
  double lo = seed * (1.0 - 1e-9);
  double hi = std::min(seed * (1.0 + 1e-9), std::nextafter(upper_limit, 0.0));
  if (!(ct(c, lo) >= lambda && ct(c, hi) <= lambda)) return seed;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ct(c, mid) > lambda ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SphereConstraint sphere_constraint(const Curvature& c, double lambda) {
  return {lambda, c, characteristic_radius(c, lambda)};
}

double model_diameter(const Curvature& c) {
  return c.sign() > 0 ? kPi / c.scale() : std::numeric_limits<double>::infinity();
}

double distance(const ModelPoint& p, const ModelPoint& q) {
  require_same_space(p, q);
  const Curvature& c = p.curvature;
  const double k = c.scale();
  if (c.sign() == 0) return (p.coords - q.coords).norm();
  if (c.sign() > 0) {
    return 2.0 / k * std::atan2((p.coords - q.coords).norm(), (p.coords + q.coords).norm());
  }
  const double cosh_kd = c.value() * ambient_dot(c, p.coords, q.coords);
  if (cosh_kd < 2.0) {
    const Vec diff = p.coords - q.coords;
    return 2.0 / k * std::asinh(0.5 * k * ambient_norm(c, diff));
  }
  return std::acosh(cosh_kd) / k;
}

double norm(const TangentVector& v) { return ambient_norm(v.base.curvature, v.vec); }

ModelPoint exp_map(const TangentVector& v, double t) {
  const Curvature& c = v.base.curvature;
  const Vec w = t * v.vec;
  if (c.sign() == 0) return {v.base.coords + w, c};
  const double len = ambient_norm(c, w);
  if (len == 0.0) return v.base;
  return {cs(c, len) * v.base.coords + (sn(c, len) / len) * w, c};
}

TangentVector log_map(const ModelPoint& p, const ModelPoint& q) {
  require_same_space(p, q);
  const Curvature& c = p.curvature;
  if (c.sign() == 0) return {p, q.coords - p.coords};
  const double d = distance(p, q);
  if (c.sign() > 0 && d > kPi / c.scale() - 1e-9) {
    fail(ErrorCode::kDomain, "log map at cut locus (antipodal points)");
  }
  Vec w = q.coords - c.value() * ambient_dot(c, p.coords, q.coords) * p.coords;
  const double len = ambient_norm(c, w);
  if (d == 0.0 || len == 0.0) return {p, Vec::Zero(p.coords.size())};
  return {p, (d / len) * w};
}

double angle(const TangentVector& u, const TangentVector& v) {
  require_same_space(u.base, v.base);
  const Curvature& c = u.base.curvature;
  const double nu = ambient_norm(c, u.vec);
  const double nv = ambient_norm(c, v.vec);
  if (nu == 0.0 || nv == 0.0) fail(ErrorCode::kDomain, "angle with a zero vector");
  const Vec a = u.vec / nu;
  const Vec b = v.vec / nv;
  return 2.0 * std::atan2(ambient_norm(c, a - b), ambient_norm(c, a + b));
}

Vec parallel_transport(const ModelPoint& p, const ModelPoint& q, const Vec& w) {
  const Curvature& c = p.curvature;
  if (c.sign() == 0) return w;
  const TangentVector u = log_map(p, q);
  const double d = norm(u);
  if (d == 0.0) return w;
  const Vec dir = u.vec / d;
  const double along = ambient_dot(c, w, dir);
  const Vec velocity_end = -c.value() * sn(c, d) * p.coords + cs(c, d) * dir;
  return w - along * dir + along * velocity_end;
}

double model_third_side(const Curvature& c, double a, double b, double included_angle) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(included_angle >= -1e-15) || !(included_angle <= kPi + 1e-15)) {
    fail(ErrorCode::kDomain, "not a valid triangle");
  }
  const double k = c.scale();
  if (c.sign() > 0 && (k * a > kPi + 1e-12 || k * b > kPi + 1e-12)) {
    fail(ErrorCode::kDomain, "not a valid triangle");
  }
  const int s = c.sign();
  const double h = std::sin(0.5 * included_angle);
  const double chord = half_chord(s, k * (a - b)) + sn_canon(s, k * a) * sn_canon(s, k * b) * h * h;
  const double root = std::sqrt(std::max(0.0, chord));
  switch (s) {
    case 1:
      return 2.0 / k * std::asin(std::min(1.0, root));
    case -1:
      return 2.0 / k * std::asinh(root);
    default:
      return 2.0 * root;
  }
}

double model_triangle_angle(const Curvature& c, double a, double b, double opposite) {
  const double k = c.scale();
  const double scale = std::max({1.0, a, b, opposite});
  const double slack = 1e-12 * scale;
  bool valid = a > 0.0 && b > 0.0 && opposite >= 0.0 && opposite <= a + b + slack &&
               opposite >= std::abs(a - b) - slack;
  if (c.sign() > 0) {
    const double limit = kPi / k;
    valid = valid && a <= limit + slack && b <= limit + slack && opposite <= limit + slack &&
            a + b + opposite <= 2.0 * limit + slack;
  }
  if (!valid) fail(ErrorCode::kDomain, "not a valid triangle");

  const int s = c.sign();
  const double x = k * opposite;
  const double y = k * (a - b);
  // S(x) - S(y) factors as sn((x+y)/2) * sn((x-y)/2), which keeps degenerate
  // triangles (opposite == |a - b|) exact.
  const double numer = sn_canon(s, 0.5 * (x + y)) * sn_canon(s, 0.5 * (x - y));
  const double denom = sn_canon(s, k * a) * sn_canon(s, k * b);
  const double half_sin_sq = std::clamp(numer / denom, 0.0, 1.0);
  return 2.0 * std::asin(std::sqrt(half_sin_sq));
}

double unit_sphere_measure(int n) {
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double sphere_area(const Curvature& c, int m, double r) {
  if (m < 2 || !(r > 0.0) || r > model_diameter(c) * (1.0 + 1e-15)) {
    fail(ErrorCode::kDomain, "sphere_area: invalid radius or dimension");
  }
  return unit_sphere_measure(m - 1) * std::pow(sn(c, r), m - 1);
}

double ball_volume(const Curvature& c, int m, double r) {
  if (m < 2 || !(r > 0.0) || r > model_diameter(c) * (1.0 + 1e-15)) {
    fail(ErrorCode::kDomain, "ball_volume: invalid radius or dimension");
  }
  const double k = c.scale();
  const double x = k * r;
  const int s = c.sign();
  if (m == 2) {
    // int_0^r sn = 2 sn(r/2)^2 / sign, written without cancellation.
    const double h = sn_canon(s, 0.5 * x);
    return 2.0 * kPi * (s == 0 ? 0.5 * r * r : 2.0 * h * h / (k * k));
  }
  if (m == 3 && (s == 0 || x >= 0.1)) {
    double integral = 0.0;
    if (s == 0) integral = r * r * r / 3.0;
    if (s > 0) integral = (x - std::sin(x) * std::cos(x)) / (2.0 * k * k * k);
    if (s < 0) integral = (std::sinh(x) * std::cosh(x) - x) / (2.0 * k * k * k);
    return 4.0 * kPi * integral;
  }
  const double omega = unit_sphere_measure(m - 1);
  auto integrand = [&](double t) { return std::pow(sn(c, t), m - 1); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, r, 15, 1e-14);
  return omega * integral;
}

}  // namespace rollkit
