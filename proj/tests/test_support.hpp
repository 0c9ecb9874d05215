#pragma once

// Independent references used by the unit tests. Nothing here calls the
// library: oracles are series, bisections and plain ambient algebra.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rollkit/model_space.hpp"

namespace rollkit::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(0x5eed1234abcdULL);
  return g;
}
inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

// sinh / cosh by their power series.
inline double series_sinh(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 40; ++k) {
    term *= x * x / double((2 * k) * (2 * k + 1));
    sum += term;
  }
  return sum;
}
inline double series_cosh(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= x * x / double((2 * k - 1) * (2 * k));
    sum += term;
  }
  return sum;
}

// Root of a monotone f on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const bool inc = f(hi) > f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == inc) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Point at geodesic polar coordinates (r, direction w) from the model origin,
// written out with sn/cs-free closed forms so that the library's exp map is
// not involved.
inline ModelPoint polar_point(const Curvature& c, double r, const std::vector<double>& w) {
  const int m = int(w.size());
  double n = 0.0;
  for (double x : w) n += x * x;
  n = std::sqrt(n);
  const double k = c.scale();
  if (c.sign() == 0) {
    Vec v(m);
    for (int i = 0; i < m; ++i) v[i] = r * w[i] / n;
    return make_point(c, v, 1e-9);
  }
  Vec v(m + 1);
  const double a = k * r;
  v[0] = (c.sign() > 0 ? std::cos(a) : std::cosh(a)) / k;
  const double s = (c.sign() > 0 ? std::sin(a) : std::sinh(a)) / k;
  for (int i = 0; i < m; ++i) v[i + 1] = s * w[i] / n;
  return make_point(c, v, 1e-9);
}

inline ModelPoint random_point(const Curvature& c, int m, double max_r) {
  std::vector<double> w(m);
  for (auto& x : w) x = uniform(-1.0, 1.0);
  return polar_point(c, uniform(0.0, max_r), w);
}

}  // namespace rollkit::testing
