#include "rollkit/riemannian2d.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rollkit {

namespace {

constexpr double kPi = std::numbers::pi;

double quad(const Mat2& g, const Vec2& a, const Vec2& b) { return a.dot(g * b); }

}  // namespace

// ---- metrics ----------------------------------------------------------------------

ChartMetric::ChartMetric(Parts parts) : parts_(std::make_shared<const Parts>(std::move(parts))) {
  if (!parts_->metric || !parts_->in_domain) fail(ErrorCode::kInvalidInput, "chart metric needs g and a domain");
}

ModelPoint ChartMetric::to_model(const Vec2& u) const {
  if (!parts_->to_model) fail(ErrorCode::kInvalidInput, "chart has no model-space embedding");
  return parts_->to_model(u);
}

Mat2 ChartMetric::g(const Vec2& u) const {
  const Mat2 m = parts_->metric(u);
  const double tr = m.trace(), det = m.determinant();
  if (!(det > 1e-20) || !(tr > 0.0)) fail(ErrorCode::kNumerical, "singular metric");
  return m;
}

MetricJet ChartMetric::jet(const Vec2& u) const {
  if (parts_->analytic_jet) return parts_->analytic_jet(u);
  return finite_difference_jet(u);
}

MetricJet ChartMetric::finite_difference_jet(const Vec2& u) const {
  const double h = parts_->fd_step;
  const auto& f = parts_->metric;
  MetricJet j;
  j.g = g(u);
  const Vec2 e0(h, 0.0), e1(0.0, h);
  const Mat2 p0 = f(u + e0), m0 = f(u - e0), p1 = f(u + e1), m1 = f(u - e1);
  j.dg[0] = (p0 - m0) / (2.0 * h);
  j.dg[1] = (p1 - m1) / (2.0 * h);
  j.ddg[0] = (p0 - 2.0 * j.g + m0) / (h * h);
  j.ddg[2] = (p1 - 2.0 * j.g + m1) / (h * h);
  j.ddg[1] = (f(u + e0 + e1) - f(u + e0 - e1) - f(u - e0 + e1) + f(u - e0 - e1)) / (4.0 * h * h);
  return j;
}

ChartMetric ChartMetric::without_analytic() const {
  Parts p = *parts_;
  p.analytic_jet = nullptr;
  p.analytic_curvature = nullptr;
  return ChartMetric(std::move(p));
}

ChartMetric euclidean_chart() {
  ChartMetric::Parts p;
  p.name = "euclidean";
  p.metric = [](const Vec2&) { return Mat2::Identity().eval(); };
  p.analytic_jet = [](const Vec2&) {
    MetricJet j;
    j.g = Mat2::Identity();
    j.dg = {Mat2::Zero(), Mat2::Zero()};
    j.ddg = {Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
    return j;
  };
  p.analytic_curvature = [](const Vec2&) { return 0.0; };
  p.in_domain = [](const Vec2& u) { return u.allFinite(); };
  p.to_model = [](const Vec2& u) { return ModelPoint{Vec(u), Curvature(0.0)}; };
  p.diameter_cap = std::numeric_limits<double>::infinity();
  return ChartMetric(std::move(p));
}

namespace {

// g = 4 / (1 + c|u|^2)^2 I: stereographic (c > 0) or Poincare (c < 0) chart.
ChartMetric conformal_chart(const std::string& name, double c) {
  ChartMetric::Parts p;
  p.name = name;
  p.params = {{"c", c}};
  p.metric = [c](const Vec2& u) {
    const double s = 1.0 + c * u.squaredNorm();
    return (4.0 / (s * s) * Mat2::Identity()).eval();
  };
  p.analytic_jet = [c](const Vec2& u) {
    const double s = 1.0 + c * u.squaredNorm();
    const double s3 = s * s * s, s4 = s3 * s;
    MetricJet j;
    j.g = 4.0 / (s * s) * Mat2::Identity();
    for (int k = 0; k < 2; ++k) j.dg[k] = (-16.0 * c * u[k] / s3) * Mat2::Identity();
    auto second = [&](int k, int l) { return -16.0 * c * (k == l ? 1.0 : 0.0) / s3 + 96.0 * c * c * u[k] * u[l] / s4; };
    j.ddg[0] = second(0, 0) * Mat2::Identity();
    j.ddg[1] = second(0, 1) * Mat2::Identity();
    j.ddg[2] = second(1, 1) * Mat2::Identity();
    return j;
  };
  p.analytic_curvature = [c](const Vec2&) { return c; };
  const double k = std::sqrt(std::abs(c));
  if (c > 0.0) {
    p.in_domain = [](const Vec2& u) { return u.allFinite() && u.norm() < 1e3; };
    p.diameter_cap = 0.5 * kPi / k;
  } else {
    p.in_domain = [k](const Vec2& u) { return u.allFinite() && k * u.norm() < 1.0 - 1e-9; };
    p.diameter_cap = 3.0 / k;
  }
  const Curvature curv(c);
  p.to_model = [c, k, curv](const Vec2& u) {
    const double s = 1.0 + c * u.squaredNorm();
    Vec x(3);
    x << (1.0 - c * u.squaredNorm()) / (k * s), 2.0 * u[0] / s, 2.0 * u[1] / s;
    return ModelPoint{x, curv};
  };
  return ChartMetric(std::move(p));
}

struct Profile {
  double f, f1, f2;
};

}  // namespace

ChartMetric round_sphere_chart(double c) {
  if (!(c > 0.0)) fail(ErrorCode::kDomain, "round sphere chart needs c > 0");
  return conformal_chart("round_sphere", c);
}

ChartMetric hyperbolic_chart(double c) {
  if (!(c < 0.0)) fail(ErrorCode::kDomain, "hyperbolic chart needs c < 0");
  return conformal_chart("hyperbolic", c);
}

ChartMetric revolution_chart(const RevolutionMetricProfile& profile) {
  std::function<Profile(double)> prof;
  ChartMetric::Parts p;
  p.name = "revolution";
  if (profile.kind == "sinh") {
    prof = [](double u) { return Profile{std::sinh(u), std::cosh(u), std::sinh(u)}; };
    p.in_domain = [](const Vec2& u) { return u.allFinite() && u[0] > 1e-9; };
    p.diameter_cap = 3.0;
    p.params = {{"sinh", 1.0}};
  } else if (profile.kind == "sine_series") {
    if (profile.sine_terms.empty()) fail(ErrorCode::kInvalidInput, "sine_series profile needs terms");
    const auto terms = profile.sine_terms;
    prof = [terms](double u) {
      Profile r{0.0, 0.0, 0.0};
      for (const auto& [k, a] : terms) {
        r.f += a * std::sin(k * u);
        r.f1 += a * k * std::cos(k * u);
        r.f2 -= a * k * k * std::sin(k * u);
      }
      return r;
    };
    p.in_domain = [prof](const Vec2& u) { return u.allFinite() && u[0] > 1e-9 && u[0] < kPi - 1e-9 && prof(u[0]).f > 0.0; };
    p.diameter_cap = 0.5 * kPi;
    for (const auto& [k, a] : terms) p.params.emplace_back("a" + std::to_string(k), a);
  } else {
    fail(ErrorCode::kInvalidInput, "unknown revolution profile '" + profile.kind + "'");
  }
  p.metric = [prof](const Vec2& u) {
    const double f = prof(u[0]).f;
    Mat2 g;
    g << 1.0, 0.0, 0.0, f * f;
    return g;
  };
  p.analytic_jet = [prof](const Vec2& u) {
    const Profile r = prof(u[0]);
    MetricJet j;
    j.g << 1.0, 0.0, 0.0, r.f * r.f;
    j.dg[0] << 0.0, 0.0, 0.0, 2.0 * r.f * r.f1;
    j.dg[1] = Mat2::Zero();
    j.ddg[0] << 0.0, 0.0, 0.0, 2.0 * (r.f1 * r.f1 + r.f * r.f2);
    j.ddg[1] = Mat2::Zero();
    j.ddg[2] = Mat2::Zero();
    return j;
  };
  p.analytic_curvature = [prof](const Vec2& u) {
    const Profile r = prof(u[0]);
    return -r.f2 / r.f;
  };
  return ChartMetric(std::move(p));
}

ChartMetric perturbed_sphere_chart(double eps) {
  if (!(std::abs(eps) < 1.0 / 12.0)) fail(ErrorCode::kDomain, "perturbation too large");
  return revolution_chart({"sine_series", {{1, 1.0 - 3.0 * eps}, {3, eps}}});
}

// ---- curvature ----------------------------------------------------------------------

Christoffel christoffel(const MetricJet& j) {
  const double det = j.g.determinant();
  if (!(det > 1e-20)) fail(ErrorCode::kNumerical, "singular metric");
  const Mat2 inv = j.g.inverse();
  Christoffel G;
  for (int k = 0; k < 2; ++k) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += inv(k, l) * (j.dg[a](b, l) + j.dg[b](a, l) - j.dg[l](a, b));
        G[k](a, b) = 0.5 * s;
      }
  }
  return G;
}

Christoffel christoffel(const ChartMetric& metric, const Vec2& u) { return christoffel(metric.jet(u)); }

double gaussian_curvature(const MetricJet& j) {
  // Brioschi formula.
  const double E = j.g(0, 0), F = j.g(0, 1), G = j.g(1, 1);
  const double Eu = j.dg[0](0, 0), Ev = j.dg[1](0, 0);
  const double Fu = j.dg[0](0, 1), Fv = j.dg[1](0, 1);
  const double Gu = j.dg[0](1, 1), Gv = j.dg[1](1, 1);
  const double Evv = j.ddg[2](0, 0), Fuv = j.ddg[1](0, 1), Guu = j.ddg[0](1, 1);
  const double det = E * G - F * F;
  if (!(det > 1e-20)) fail(ErrorCode::kNumerical, "singular metric");
  Eigen::Matrix3d A, B;
  A << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
       Fv - 0.5 * Gu, E, F,
       0.5 * Gv, F, G;
  B << 0.0, 0.5 * Ev, 0.5 * Gu,
       0.5 * Ev, E, F,
       0.5 * Gu, F, G;
  return (A.determinant() - B.determinant()) / (det * det);
}

double gaussian_curvature(const ChartMetric& metric, const Vec2& u) { return gaussian_curvature(metric.jet(u)); }

// ---- geodesics ------------------------------------------------------------------------

double speed(const ChartMetric& metric, const GeodesicState& st) {
  return std::sqrt(quad(metric.g(st.u), st.du, st.du));
}

namespace {

struct Deriv {
  Vec2 du, ddu;
};

Deriv geodesic_rhs(const ChartMetric& metric, const Vec2& u, const Vec2& du) {
  if (!metric.in_domain(u)) fail(ErrorCode::kDomain, "geodesic left the chart");
  const Christoffel G = christoffel(metric, u);
  Deriv d;
  d.du = du;
  d.ddu = Vec2(-du.dot(G[0] * du), -du.dot(G[1] * du));
  return d;
}

void rk4(const ChartMetric& metric, GeodesicState& st, double h) {
  const Deriv k1 = geodesic_rhs(metric, st.u, st.du);
  const Deriv k2 = geodesic_rhs(metric, st.u + 0.5 * h * k1.du, st.du + 0.5 * h * k1.ddu);
  const Deriv k3 = geodesic_rhs(metric, st.u + 0.5 * h * k2.du, st.du + 0.5 * h * k2.ddu);
  const Deriv k4 = geodesic_rhs(metric, st.u + h * k3.du, st.du + h * k3.ddu);
  st.u += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
  st.du += h / 6.0 * (k1.ddu + 2.0 * k2.ddu + 2.0 * k3.ddu + k4.ddu);
  st.s += h;
  if (!metric.in_domain(st.u)) fail(ErrorCode::kDomain, "geodesic left the chart");
}

int step_count(double extent, double step) { return std::max(1, int(std::ceil(extent / step))); }

// Integrates the parameter interval [0, 1] in n equal steps.
Vec2 shoot_endpoint(const ChartMetric& metric, const Vec2& a, const Vec2& w, int n, Vec2* final_velocity = nullptr) {
  GeodesicState st{a, w, 0.0};
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) rk4(metric, st, h);
  if (final_velocity) *final_velocity = st.du;
  return st.u;
}

}  // namespace

std::vector<GeodesicState> integrate_geodesic(const ChartMetric& metric, const GeodesicState& start, double length,
                                              double step) {
  if (!(step > 0.0) || length < 0.0) fail(ErrorCode::kInvalidInput, "geodesic needs step > 0 and length >= 0");
  const int n = step_count(length, step);
  const double h = length / n;
  std::vector<GeodesicState> path = {start};
  GeodesicState st = start;
  for (int i = 0; i < n; ++i) {
    rk4(metric, st, h);
    path.push_back(st);
  }
  return path;
}

GeodesicState geodesic_endpoint(const ChartMetric& metric, const GeodesicState& start, double length, double step) {
  if (!(step > 0.0) || length < 0.0) fail(ErrorCode::kInvalidInput, "geodesic needs step > 0 and length >= 0");
  const int n = step_count(length, step);
  const double h = length / n;
  GeodesicState st = start;
  for (int i = 0; i < n; ++i) rk4(metric, st, h);
  return st;
}

namespace {

// Newton iteration on F(w) = endpoint(a, w) - b with a finite-difference Jacobian.
bool newton_shoot(const ChartMetric& metric, const Vec2& a, const Vec2& b, Vec2& w, int n,
                  const ShootingOptions& opt, double& miss, int& iters) {
  auto residual = [&](const Vec2& v, Vec2& r) {
    try {
      r = shoot_endpoint(metric, a, v, n) - b;
      return r.allFinite();
    } catch (const Error&) {
      return false;
    }
  };
  Vec2 F;
  if (!residual(w, F)) return false;
  for (iters = 0; iters < opt.max_newton; ++iters) {
    miss = F.norm();
    if (miss < opt.miss_tol) return true;
    const double delta = 1e-7 * std::max(1.0, w.norm());
    Mat2 J;
    for (int k = 0; k < 2; ++k) {
      Vec2 wp = w, wm = w, Fp, Fm;
      wp[k] += delta;
      wm[k] -= delta;
      if (!residual(wp, Fp) || !residual(wm, Fm)) return false;
      J.col(k) = (Fp - Fm) / (2.0 * delta);
    }
    if (!(std::abs(J.determinant()) > 1e-14)) return false;
    const Vec2 dw = -J.inverse() * F;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
      Vec2 trial = w + t * dw, Ft;
      if (residual(trial, Ft) && Ft.norm() < miss) {
        w = trial;
        F = Ft;
        improved = true;
        break;
      }
    }
    if (!improved) return F.norm() < opt.miss_tol;
  }
  miss = F.norm();
  return miss < opt.miss_tol;
}

}  // namespace

ChartGeodesic shoot_geodesic(const ChartMetric& metric, const Vec2& a, const Vec2& b, const ShootingOptions& opt,
                             const Vec2* guess) {
  if (!metric.in_domain(a) || !metric.in_domain(b)) fail(ErrorCode::kDomain, "shooting endpoints outside the chart");
  ChartGeodesic out;
  const Mat2 ga = metric.g(a);
  if ((b - a).norm() == 0.0) {
    out.initial_velocity = Vec2(1.0, 0.0) / std::sqrt(ga(0, 0));
    out.final_velocity = out.initial_velocity;
    return out;
  }
  Vec2 w = guess ? *guess : Vec2(b - a);
  auto solve = [&](Vec2& v) {
    // Fix the step count from the current speed, then re-solve once if it drifted.
    for (int pass = 0; pass < 2; ++pass) {
      const double L = std::sqrt(quad(ga, v, v));
      const int n = step_count(L, opt.step);
      if (!newton_shoot(metric, a, b, v, n, opt, out.miss, out.iterations)) return false;
      const double L2 = std::sqrt(quad(ga, v, v));
      if (step_count(L2, opt.step) == n) return true;
    }
    return true;
  };

  bool ok = solve(w);
  if (!ok) {
    // Angular sweep: closest approach of unit-speed geodesics from a.
    out.used_sweep = true;
    const Vec2 e0 = Vec2(1.0, 0.0) / std::sqrt(ga(0, 0));
    Vec2 e1(0.0, 1.0);
    e1 -= quad(ga, e1, e0) * e0;
    e1 /= std::sqrt(quad(ga, e1, e1));
    const Vec2 dab = b - a;
    const double L0 = std::sqrt(quad(ga, dab, dab));
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_w = w;
    for (int k = 0; k < opt.sweep_samples; ++k) {
      const double th = 2.0 * kPi * k / opt.sweep_samples;
      GeodesicState st{a, std::cos(th) * e0 + std::sin(th) * e1, 0.0};
      const int n = step_count(2.0 * L0, 4.0 * opt.step);
      const double h = 2.0 * L0 / n;
      try {
        for (int i = 0; i < n; ++i) {
          rk4(metric, st, h);
          const double d = (st.u - b).norm();
          if (d < best) best = d, best_w = (std::cos(th) * e0 + std::sin(th) * e1) * st.s;
        }
      } catch (const Error&) {
      }
    }
    w = best_w;
    ok = solve(w);
  }
  if (!ok) fail(ErrorCode::kNumerical, "no geodesic found in chart");
  out.length = std::sqrt(quad(ga, w, w));
  out.initial_velocity = w / out.length;
  Vec2 fv;
  shoot_endpoint(metric, a, w, step_count(out.length, opt.step), &fv);
  out.final_velocity = fv / std::sqrt(quad(metric.g(b), fv, fv));
  return out;
}

double chart_distance(const ChartMetric& metric, const Vec2& a, const Vec2& b, const ShootingOptions& options) {
  return shoot_geodesic(metric, a, b, options).length;
}

// ---- curves ---------------------------------------------------------------------------

ChartCurve chart_oval(const Vec2& center, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::kDomain, "oval semi-axes must be positive");
  ChartCurve c;
  c.x = [=](double t) { return Vec2(center[0] + a * std::cos(t), center[1] + b * std::sin(t)); };
  c.dx = [=](double t) { return Vec2(-a * std::sin(t), b * std::cos(t)); };
  c.ddx = [=](double t) { return Vec2(-a * std::cos(t), -b * std::sin(t)); };
  return c;
}

std::vector<Vec2> metric_circle(const ChartMetric& metric, const Vec2& center, double r, int samples, double step) {
  const Mat2 g = metric.g(center);
  const Vec2 e0 = Vec2(1.0, 0.0) / std::sqrt(g(0, 0));
  Vec2 e1(0.0, 1.0);
  e1 -= quad(g, e1, e0) * e0;
  e1 /= std::sqrt(quad(g, e1, e1));
  std::vector<Vec2> out;
  for (int i = 0; i < samples; ++i) {
    const double th = 2.0 * kPi * i / samples;
    out.push_back(geodesic_endpoint(metric, {center, std::cos(th) * e0 + std::sin(th) * e1, 0.0}, r, step).u);
  }
  return out;
}

double geodesic_curvature(const ChartMetric& metric, const Vec2& x, const Vec2& dx, const Vec2& ddx) {
  const MetricJet j = metric.jet(x);
  const Christoffel G = christoffel(j);
  const double sp2 = quad(j.g, dx, dx);
  if (!(sp2 > 1e-24)) fail(ErrorCode::kDomain, "non-immersed curve point");
  const Vec2 acc(ddx[0] + dx.dot(G[0] * dx), ddx[1] + dx.dot(G[1] * dx));
  const double area = std::sqrt(j.g.determinant());
  return area * (dx[0] * acc[1] - dx[1] * acc[0]) / (sp2 * std::sqrt(sp2));
}

double geodesic_curvature(const ChartMetric& metric, const ChartCurve& curve, double theta) {
  return geodesic_curvature(metric, curve.x(theta), curve.dx(theta), curve.ddx(theta));
}

double geodesic_curvature(const ChartMetric& metric, const std::vector<Vec2>& samples, std::size_t i) {
  const std::size_t n = samples.size();
  if (n < 3) fail(ErrorCode::kInvalidInput, "need at least 3 curve samples");
  const Vec2& prev = samples[(i + n - 1) % n];
  const Vec2& next = samples[(i + 1) % n];
  return geodesic_curvature(metric, samples[i], 0.5 * (next - prev), next - 2.0 * samples[i] + prev);
}

double geodesic_curvature_open(const ChartMetric& metric, const std::vector<Vec2>& samples, std::size_t i) {
  if (i == 0 || i + 1 >= samples.size()) fail(ErrorCode::kInvalidInput, "open-curve curvature needs an interior sample");
  const Vec2& prev = samples[i - 1];
  const Vec2& next = samples[i + 1];
  return geodesic_curvature(metric, samples[i], 0.5 * (next - prev), next - 2.0 * samples[i] + prev);
}

Vec2 left_normal(const ChartMetric& metric, const Vec2& u, const Vec2& dir) {
  const Mat2 g = metric.g(u);
  Vec2 n(-dir[1], dir[0]);
  n -= quad(g, n, dir) / quad(g, dir, dir) * dir;
  return n / std::sqrt(quad(g, n, n));
}

double metric_angle(const ChartMetric& metric, const Vec2& u, const Vec2& a, const Vec2& b) {
  const Mat2 g = metric.g(u);
  const double cross = std::sqrt(g.determinant()) * (a[0] * b[1] - a[1] * b[0]);
  return std::atan2(std::abs(cross), quad(g, a, b));
}

// ---- certification and comparison -----------------------------------------------------

CurvatureBound sample_curvature(const ChartMetric& metric, const Vec2& lo, const Vec2& hi, int n) {
  CurvatureBound r;
  r.samples_per_axis = n;
  r.min_k = std::numeric_limits<double>::infinity();
  r.max_k = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Vec2 u(lo[0] + (hi[0] - lo[0]) * i / std::max(1, n - 1), lo[1] + (hi[1] - lo[1]) * k / std::max(1, n - 1));
      if (!metric.in_domain(u)) fail(ErrorCode::kDomain, "curvature sampling region leaves the chart");
      const double K = gaussian_curvature(metric, u);
      if (K < r.min_k) r.min_k = K, r.argmin = u;
      r.max_k = std::max(r.max_k, K);
    }
  return r;
}

CurvatureBound certify_curvature_lower_bound(const ChartMetric& metric, double c, const Vec2& lo, const Vec2& hi,
                                             double tol, int n) {
  const CurvatureBound r = sample_curvature(metric, lo, hi, n);
  if (r.min_k < c - tol) fail(ErrorCode::kCertification, "hypothesis sec >= c violated on region");
  return r;
}

ToponogovReport toponogov_check(const ChartMetric& metric, double c, const Vec2& x, const Vec2& y, const Vec2& z,
                                double tol, const ShootingOptions& options, int curvature_samples) {
  ToponogovReport r;
  r.tolerance = tol;
  Vec2 lo = x.cwiseMin(y).cwiseMin(z), hi = x.cwiseMax(y).cwiseMax(z);
  const Vec2 pad = 0.25 * (hi - lo) + Vec2::Constant(1e-3);
  lo -= pad;
  hi += pad;
  r.curvature = certify_curvature_lower_bound(metric, c, lo, hi, tol, curvature_samples);
  const ChartGeodesic xy = shoot_geodesic(metric, x, y, options);
  const ChartGeodesic xz = shoot_geodesic(metric, x, z, options);
  r.side_xy = xy.length;
  r.side_xz = xz.length;
  r.side_yz = chart_distance(metric, y, z, options);
  r.angle_x = metric_angle(metric, x, xy.initial_velocity, xz.initial_velocity);
  r.model_side = model_third_side(Curvature(c), r.side_xy, r.side_xz, r.angle_x);
  r.margin = r.model_side - r.side_yz;
  r.passed = r.margin >= -tol;
  return r;
}

Rolling2dReport verify_ball_rolling_2d(const ChartMetric& metric, double c, const ChartCurve& curve, double lambda,
                                       const std::vector<std::size_t>& seeds, double tol,
                                       const Rolling2dOptions& options) {
  const int n = options.curve_samples;
  if (n < 8) fail(ErrorCode::kInvalidInput, "need at least 8 curve samples");
  std::vector<Vec2> xs, dxs;
  Rolling2dReport r;
  r.tolerance = tol;
  r.min_geodesic_curvature = std::numeric_limits<double>::infinity();
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double th = curve.period * i / n;
    xs.push_back(curve.x(th));
    dxs.push_back(curve.dx(th));
    lo = lo.cwiseMin(xs.back());
    hi = hi.cwiseMax(xs.back());
    r.min_geodesic_curvature = std::min(r.min_geodesic_curvature, geodesic_curvature(metric, curve, th));
  }
  r.lambda = lambda > 0.0 ? lambda : r.min_geodesic_curvature;
  if (r.min_geodesic_curvature < r.lambda - tol) fail(ErrorCode::kCertification, "curve not certified lambda-convex");
  const Vec2 pad = Vec2::Constant(options.region_padding);
  r.curvature = certify_curvature_lower_bound(metric, c, lo - pad, hi + pad, tol, options.curvature_samples);
  r.R_lambda = characteristic_radius(Curvature(c), r.lambda);
  if (2.0 * r.R_lambda > metric.diameter_cap()) {
    fail(ErrorCode::kDomain, "2 R_lambda exceeds the chart's diameter cap");
  }

  r.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const std::size_t i = seeds[k] % xs.size();
    Rolling2dSeed sr;
    sr.seed_index = i;
    const Vec2 nu = left_normal(metric, xs[i], dxs[i]);
    sr.center = geodesic_endpoint(metric, {xs[i], nu, 0.0}, r.R_lambda, 1e-3).u;
    Vec2 warm;
    bool have_warm = false;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const ChartGeodesic gq = shoot_geodesic(metric, sr.center, xs[j], options.shooting, have_warm ? &warm : nullptr);
      warm = gq.length * gq.initial_velocity;
      have_warm = gq.length > 0.0;
      if (gq.length > sr.max_distance) sr.max_distance = gq.length, sr.argmax = j;
    }
    sr.margin = r.R_lambda - sr.max_distance;
    sr.passed = sr.margin >= -tol;
    r.min_margin = std::min(r.min_margin, sr.margin);
    r.seeds.push_back(sr);
  }
  r.passed = !r.seeds.empty();
  for (const auto& s : r.seeds) r.passed = r.passed && s.passed;
  return r;
}

}  // namespace rollkit
