#include <gtest/gtest.h>

#include <cmath>

#include "rollkit/convex_body.hpp"
#include "rollkit/error.hpp"
#include "rollkit/radial_angle.hpp"
#include "test_support.hpp"

namespace rollkit {
namespace {

using testing::kPi;
using testing::polar_point;
using testing::uniform;
using testing::vec;

const Curvature kFlat(0.0), kSphere(1.0), kHyper(-1.0);

Params param(double t) { return Params::Constant(1, t); }

ModelPoint flat_point(double x, double y) { return make_point(kFlat, vec({x, y})); }

// Radial angle on a round circle of radius R seen from a point at distance e
// from its center, as a function of t = |pq|: the angle at q of the triangle
// (center, p, q), by the law of cosines of M(c).
double circle_cos_phi(const Curvature& c, double R, double e, double t) {
  if (c.sign() == 0) return (R * R + t * t - e * e) / (2 * R * t);
  const double k = c.scale();
  if (c.sign() < 0) {
    return (std::cosh(k * R) * std::cosh(k * t) - std::cosh(k * e)) / (std::sinh(k * R) * std::sinh(k * t));
  }
  return (std::cos(k * e) - std::cos(k * R) * std::cos(k * t)) / (std::sin(k * R) * std::sin(k * t));
}

// Nearest point of the planar ellipse (a cos s, b sin s) to (x, y): dense scan
// followed by golden-section refinement.
double ellipse_foot(double a, double b, double x, double y) {
  auto f = [&](double s) { return std::hypot(a * std::cos(s) - x, b * std::sin(s) - y); };
  double best = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double s = 2 * kPi * i / 20000;
    if (f(s) < f(best)) best = s;
  }
  double lo = best - 2 * kPi / 20000, hi = best + 2 * kPi / 20000;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    (f(m1) < f(m2) ? hi : lo) = (f(m1) < f(m2) ? m2 : m1);
  }
  return 0.5 * (lo + hi);
}

TEST(RadialAngle, VanishesFromSphereCenter) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const BodySpec body = make_geodesic_sphere(Curvature(c), 2, 0.8, Vec(), 256);
    for (std::size_t i = 0; i < body.grid().params.size(); i += 13) {
      EXPECT_NEAR(radial_angle(body, body.witness(), body.grid().params[i]), 0.0, 1e-7);
    }
  }
}

TEST(RadialAngle, VanishesAtFootPoint) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const Origin o = locate_origin(body, flat_point(0.4, 0.15));
  EXPECT_LT(radial_angle(body, o.p, o.foot), 1e-6);
  EXPECT_NEAR(o.foot[0], ellipse_foot(2.0, 1.0, 0.4, 0.15), 1e-7);
}

TEST(RadialAngle, EllipseMatchesPlanarVectorAngle) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  // q = (0, 1), inward normal (0, -1); angle between q - p and -nu = (0, 1).
  const double oracle = std::acos(1.0 / std::hypot(-0.5, 1.0));
  EXPECT_NEAR(radial_angle(body, flat_point(0.5, 0.0), param(kPi / 2)), oracle, 1e-12);
}

TEST(RadialAngle, MatchesCircleTriangleOracle) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const double R = 0.9, e = 0.35;
    const BodySpec body = make_geodesic_sphere(k, 2, R, Vec(), 256);
    const ModelPoint p = polar_point(k, e, {1.0, 0.0});
    for (int i = 0; i < 40; ++i) {
      const Params u = param(uniform(0.01, 2 * kPi - 0.01));
      const double t = distance(p, body.point(u));
      EXPECT_NEAR(std::cos(radial_angle(body, p, u)), circle_cos_phi(k, R, e, t), 1e-11);
    }
  }
}

TEST(RadialAngle, UndefinedAtOrigin) {
  const BodySpec body = make_geodesic_sphere(kFlat, 2, 1.0);
  EXPECT_THROW(radial_angle(body, flat_point(1.0, 0.0), param(0.0)), Error);
}

TEST(GradientDecomposition, SphereCenterIsPurelyNormal) {
  const BodySpec body = make_geodesic_sphere(kHyper, 3, 0.7, Vec(), 16);
  Params u(2);
  u << 1.0, 2.0;
  const GradientResiduals r = gradient_decomposition_check(body, body.witness(), u);
  EXPECT_NEAR(r.phi, 0.0, 1e-7);
  EXPECT_NEAR(r.tangential_norm, 0.0, 1e-9);
  EXPECT_NEAR(r.normal_residual, 0.0, 1e-9);
}

TEST(GradientDecomposition, ResidualsVanishOnRandomSamples) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const BodySpec body = make_ellipse_like(k, {0.8, 0.5});
    const BodySpec body3 = make_ellipse_like(k, {0.6, 0.5, 0.4}, 16);
    for (int i = 0; i < 50; ++i) {
      const ModelPoint p = polar_point(k, uniform(0.0, 0.3), {uniform(-1, 1), uniform(-1, 1)});
      const GradientResiduals r = gradient_decomposition_check(body, p, param(uniform(0.0, 6.28)));
      EXPECT_LT(std::abs(r.tangential_residual), 1e-9);
      EXPECT_LT(std::abs(r.normal_residual), 1e-9);
      const ModelPoint p3 = polar_point(k, uniform(0.0, 0.2), {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)});
      Params u(2);
      u << uniform(0.2, 2.9), uniform(0.0, 6.28);
      const GradientResiduals r3 = gradient_decomposition_check(body3, p3, u);
      EXPECT_LT(std::abs(r3.tangential_residual), 1e-9);
      EXPECT_LT(std::abs(r3.normal_residual), 1e-9);
    }
  }
}

TEST(GradientDecomposition, TangentLineConfigurationHasUnitGradient) {
  // p on the tangent line of the unit circle at q = (1, 0): phi = pi/2.
  const BodySpec body = make_geodesic_sphere(kFlat, 2, 1.0);
  const GradientResiduals r = gradient_decomposition_check(body, flat_point(1.0, 0.5), param(0.0));
  EXPECT_NEAR(r.phi, kPi / 2, 1e-12);
  EXPECT_NEAR(r.tangential_norm, 1.0, 1e-9);
}

TEST(Trajectory, DescendsToFootPoint) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const ModelPoint p = flat_point(0.3, 0.05);
  const Origin o = locate_origin(body, p);
  const double foot = ellipse_foot(2.0, 1.0, 0.3, 0.05);
  // The foot's basin of attraction is (0, pi); the far vertices are maxima.
  for (double start : {0.5, 2.0, 2.8}) {
    const Trajectory tr = integrate_trajectory(body, p, param(start), TrajectoryDirection::kDecreasing);
    const TrajectorySample& end = tr.samples.back();
    EXPECT_EQ(tr.stop_reason, "phi_floor");
    EXPECT_NEAR(end.t, o.d, 1e-6);
    const double du = std::remainder(end.u[0] - foot, 2 * kPi);
    EXPECT_LT(std::abs(du), 1e-3);
  }
}

TEST(Trajectory, OtherBasinEndsAtLocalMinimum) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const ModelPoint p = flat_point(0.3, 0.05);
  const Trajectory tr = integrate_trajectory(body, p, param(4.0), TrajectoryDirection::kDecreasing);
  const TrajectorySample& end = tr.samples.back();
  EXPECT_EQ(tr.stop_reason, "phi_floor");
  const double s = end.u[0];
  auto dist = [&](double v) { return std::hypot(2.0 * std::cos(v) - 0.3, std::sin(v) - 0.05); };
  EXPECT_NEAR(end.t, dist(s), 1e-9);
  EXPECT_LT(std::abs(dist(s + 1e-4) - dist(s - 1e-4)) / 2e-4, 1e-5);
  EXPECT_GT(end.t, locate_origin(body, p).d + 0.05);
}

TEST(Trajectory, FollowsMeridianOnSphere) {
  const BodySpec body = make_geodesic_sphere(kFlat, 3, 1.0, Vec(), 16);
  const ModelPoint p = make_point(kFlat, vec({0.0, 0.0, 0.3}));
  Params u0(2);
  u0 << 0.3, 0.7;
  const Trajectory tr = integrate_trajectory(body, p, u0, TrajectoryDirection::kIncreasing);
  ASSERT_GT(tr.samples.size(), 100u);
  for (const auto& s : tr.samples) {
    if (s.u[0] < 0.05 || s.u[0] > kPi - 0.05) continue;
    EXPECT_NEAR(s.u[1], 0.7, 1e-6);
  }
  EXPECT_GT(tr.samples.back().u[0], kPi - 0.05);
  EXPECT_NEAR(tr.samples.back().t, 1.3, 1e-5);
}

TEST(Trajectory, DistanceGrowsAtRateSinPhi) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const BodySpec body = make_ellipse_like(k, {0.8, 0.5});
    const ModelPoint p = polar_point(k, 0.1, {1.0, 0.4});
    const Trajectory tr = integrate_trajectory(body, p, param(0.4), TrajectoryDirection::kIncreasing);
    double worst = 0.0;
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      const auto &a = tr.samples[i - 1], &b = tr.samples[i];
      const double ds = b.s - a.s;
      if (ds < 0.5 * tr.nominal_step) continue;
      const double rate = (b.t - a.t) / ds;
      const double mid = std::sin(0.5 * (a.phi + b.phi));
      worst = std::max(worst, std::abs(rate - mid));
      EXPECT_GE(b.t, a.t);
      EXPECT_GE(b.phi, 0.0);
      EXPECT_LT(b.phi, kPi);
    }
    EXPECT_LT(worst, 1e-5);
  }
}

TEST(Liouville, OffsetCircleMatchesClosedForms) {
  const BodySpec body = make_geodesic_sphere(kFlat, 2, 1.0);
  const ModelPoint p = flat_point(0.3, 0.0);
  const Origin o = locate_origin(body, p);
  TrajectoryOptions opt;
  opt.step = 1e-3;
  const Trajectory tr = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing, opt);
  // Three closed forms: k = 1, mu = 1/t, cos phi = (1 + t^2 - e^2) / (2t).
  double identity = 0.0;
  for (const auto& s : tr.samples) {
    const double t = s.t;
    const double cphi = circle_cos_phi(kFlat, 1.0, 0.3, t);
    EXPECT_NEAR(std::cos(s.phi), cphi, 1e-9);
    const double dcphi = 0.5 * (1.0 - (1.0 - 0.09) / (t * t));
    identity = std::max(identity, std::abs(1.0 - cphi / t - dcphi));
  }
  EXPECT_LT(identity, 1e-14);
  const LiouvilleResult r = liouville_residual(tr, body, p);
  EXPECT_LT(r.max_residual, 1e-4);
  EXPECT_GT(r.evaluated, 100u);

  opt.step = 5e-4;
  const Trajectory half = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing, opt);
  EXPECT_GE(r.max_residual / liouville_residual(half, body, p).max_residual, 1.8);
}

TEST(Liouville, HyperbolicCircleMatchesClosedForms) {
  const double R = 1.0, e = 0.3;
  const BodySpec body = make_geodesic_sphere(kHyper, 2, R);
  const ModelPoint p = polar_point(kHyper, e, {1.0, 0.0});
  const Origin o = locate_origin(body, p);
  const Trajectory tr = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing);
  for (const auto& s : tr.samples) EXPECT_NEAR(std::cos(s.phi), circle_cos_phi(kHyper, R, e, s.t), 1e-9);
  const LiouvilleResult r = liouville_residual(tr, body, p);
  EXPECT_LT(r.max_residual, 1e-4);
  TrajectoryOptions opt;
  opt.step = 5e-4;
  const Trajectory half = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing, opt);
  EXPECT_GE(r.max_residual / liouville_residual(half, body, p).max_residual, 1.8);
}

TEST(Liouville, CenterReducesToSphereCurvature) {
  // phi = 0 everywhere, so the identity reads k = ct_c(t) with t = R.
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const BodySpec body = make_geodesic_sphere(k, 2, 0.8);
    const CurvatureSample s = curvature_sample(body, param(1.0));
    EXPECT_NEAR(radial_angle(s, body.witness()), 0.0, 1e-7);
    EXPECT_NEAR(s.kappa_min, ct(k, distance(body.witness(), s.point)), 1e-12);
  }
}

TEST(Liouville, RejectsShortTrajectories) {
  const BodySpec body = make_geodesic_sphere(kFlat, 2, 1.0);
  Trajectory tr;
  EXPECT_THROW(liouville_residual(tr, body, flat_point(0.3, 0.0)), Error);
}

TEST(ComparisonAngle, VanishesAtChordEnds) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const double lambda = c < 0 ? 2.0 : 1.0;
    const double R = characteristic_radius(k, lambda), d = 0.3 * R;
    EXPECT_NEAR(comparison_radial_angle(k, lambda, d, d), 0.0, 1e-7);
    EXPECT_NEAR(comparison_radial_angle(k, lambda, d, 2 * R - d), 0.0, 1e-7);
  }
}

TEST(ComparisonAngle, PlanarLawOfCosines) {
  EXPECT_NEAR(comparison_radial_angle(kFlat, 1.0, 0.5, 1.0), std::acos(0.875), 1e-13);
  EXPECT_NEAR(std::acos(0.875), 0.5054, 1e-4);
}

TEST(ComparisonAngle, MatchesCircleOracleInCurvedModels) {
  for (double c : {-1.0, 1.0}) {
    const Curvature k(c);
    const double lambda = 1.5, R = characteristic_radius(k, lambda), d = 0.2;
    for (double t = d + 0.01; t < 2 * R - d - 0.01; t += 0.05) {
      EXPECT_NEAR(std::cos(comparison_radial_angle(k, lambda, d, t)), circle_cos_phi(k, R, R - d, t), 1e-11);
    }
  }
}

TEST(ComparisonAngle, RejectsOutsideChordRange) {
  EXPECT_THROW(comparison_radial_angle(kFlat, 1.0, 0.5, 0.2), Error);
  EXPECT_THROW(comparison_radial_angle(kFlat, 1.0, 0.5, 1.7), Error);
}

TEST(RacCheck, EqualityOnRadiusRSphere) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const double lambda = c < 0 ? 1.8 : 1.2, R = characteristic_radius(k, lambda);
    const BodySpec body = make_geodesic_sphere(k, 2, R, Vec(), 512);
    const ModelPoint p = polar_point(k, 0.35 * R, {0.8, 0.6});
    const Origin o = locate_origin(body, p);
    const RacReport r = rac_check(body, o, lambda, 1e-6);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.skipped, 0u);
    for (const Params& u : body.grid().params) {
      const CurvatureSample s = curvature_sample(body, u);
      const double t = std::clamp(distance(p, s.point), o.d, 2 * R - o.d);
      EXPECT_NEAR(radial_angle(s, p), comparison_radial_angle(k, lambda, o.d, t), 1e-8);
    }
  }
}

TEST(RacCheck, EllipseStrictInequality) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const ModelPoint p = flat_point(0.05, 0.02);
  const Origin o = locate_origin(body, p);
  const RacReport r = rac_check(body, o, 0.25, 1e-6);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_violation, 1e-6);
  std::size_t strict = 0, checked = 0;
  for (const Params& u : body.grid().params) {
    const CurvatureSample s = curvature_sample(body, u);
    const double t = distance(p, s.point);
    if (t < o.d + 1e-2 || t > 8.0 - o.d - 1e-2) continue;
    ++checked;
    if (radial_angle(s, p) < comparison_radial_angle(kFlat, 0.25, o.d, t) - 1e-6) ++strict;
  }
  EXPECT_GT(checked, 100u);
  EXPECT_EQ(strict, checked);
}

TEST(RacCheck, SmallerSphereIsStrictlyBelowComparison) {
  for (double c : {-1.0, 0.0, 1.0}) {
    const Curvature k(c);
    const double lambda = c < 0 ? 1.8 : 1.2, R = characteristic_radius(k, lambda), r = 0.7 * R;
    const BodySpec body = make_geodesic_sphere(k, 2, r, Vec(), 512);
    const ModelPoint p = polar_point(k, 0.3 * r, {1.0, 0.2});
    const Origin o = locate_origin(body, p);
    EXPECT_TRUE(rac_check(body, o, lambda, 1e-6).passed);
    for (const Params& u : body.grid().params) {
      const CurvatureSample s = curvature_sample(body, u);
      const double t = distance(p, s.point);
      if (t < o.d + 1e-2 || t > 2 * r - o.d - 1e-2) continue;
      EXPECT_LT(radial_angle(s, p), comparison_radial_angle(k, lambda, o.d, t));
    }
  }
}

TEST(RacCheck, OverstatedLambdaIsViolated) {
  const BodySpec body = make_ellipse_like(kHyper, {0.6, 0.4});
  const ModelPoint p = polar_point(kHyper, 0.058, {0.05, 0.03});
  const RacReport r = rac_check(body, p, 2.0, 1e-6);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_violation, 1e-3);
}

TEST(Monotonicity, EllipseTrajectoriesAreNonDecreasing) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const ModelPoint p = flat_point(0.05, 0.02);
  const Origin o = locate_origin(body, p);
  for (double start : {o.foot[0] + 0.05, 1.0, 2.5, 4.0}) {
    const Trajectory tr = integrate_trajectory(body, p, param(start), TrajectoryDirection::kIncreasing);
    const MonotonicityReport m = monotonicity_certificate(tr, kFlat, 0.25, o.d, 1e-6);
    EXPECT_TRUE(m.passed) << m.min_slope;
    EXPECT_GT(m.points, 10u);
  }
}

TEST(Monotonicity, RadiusRSphereHasZeroDefect) {
  const Curvature k(1.0);
  const double lambda = 1.2, R = characteristic_radius(k, lambda);
  const BodySpec body = make_geodesic_sphere(k, 2, R);
  const ModelPoint p = polar_point(k, 0.3 * R, {1.0, 0.0});
  const Origin o = locate_origin(body, p);
  const Trajectory tr = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing);
  const MonotonicityReport m = monotonicity_certificate(tr, k, lambda, o.d, 1e-6);
  EXPECT_LT(m.max_abs_f, 1e-7);
  EXPECT_LT(std::abs(m.min_slope), 1e-6);
}

TEST(Monotonicity, OverstatedLambdaFails) {
  const BodySpec body = make_ellipse_like(kFlat, {2.0, 1.0});
  const ModelPoint p = flat_point(0.05, 0.02);
  const Origin o = locate_origin(body, p);
  const Trajectory tr = integrate_trajectory(body, p, param(o.foot[0] + 0.05), TrajectoryDirection::kIncreasing);
  const MonotonicityReport m = monotonicity_certificate(tr, kFlat, 0.6, o.d, 1e-6);
  EXPECT_FALSE(m.passed);
  EXPECT_LT(m.min_slope, -1e-6);
}

}  // namespace
}  // namespace rollkit
