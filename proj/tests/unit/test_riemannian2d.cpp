#include <gtest/gtest.h>

#include <cmath>

#include "rollkit/error.hpp"
#include "rollkit/riemannian2d.hpp"
#include "test_support.hpp"

namespace rollkit {
namespace {

using testing::kPi;
using testing::uniform;

// f = sin u + 0.1 sin 3u and its derivatives.
double bump_f(double u) { return std::sin(u) + 0.1 * std::sin(3 * u); }
double bump_df(double u) { return std::cos(u) + 0.3 * std::cos(3 * u); }
double bump_ddf(double u) { return -std::sin(u) - 0.9 * std::sin(3 * u); }

ChartMetric bump_chart() {
  RevolutionMetricProfile p;
  p.sine_terms = {{1, 1.0}, {3, 0.1}};
  return revolution_chart(p);
}

// Unit sphere point of a stereographic chart coordinate, written out by hand.
Eigen::Vector3d stereo_inverse(const Vec2& u) {
  const double n = u.squaredNorm();
  return Eigen::Vector3d(2 * u[0], 2 * u[1], 1 - n) / (1 + n);
}

Vec2 random_in_disk(double r) {
  const double a = uniform(0, 2 * kPi), s = r * std::sqrt(uniform(0, 1));
  return Vec2(s * std::cos(a), s * std::sin(a));
}

TEST(Christoffel, EuclideanVanishes) {
  const ChartMetric e = euclidean_chart();
  const Christoffel g = christoffel(e, Vec2(0.3, -1.2));
  EXPECT_LT(g[0].norm() + g[1].norm(), 1e-15);
}

TEST(Christoffel, RevolutionClosedForms) {
  const ChartMetric m = bump_chart();
  for (double u : {0.4, 1.1, 1.9, 2.6}) {
    const Christoffel g = christoffel(m, Vec2(u, 0.7));
    EXPECT_NEAR(g[0](1, 1), -bump_f(u) * bump_df(u), 1e-12);
    EXPECT_NEAR(g[1](0, 1), bump_df(u) / bump_f(u), 1e-12);
    EXPECT_NEAR(g[1](1, 0), bump_df(u) / bump_f(u), 1e-12);
    EXPECT_NEAR(g[0](0, 0), 0.0, 1e-15);
    EXPECT_NEAR(g[0](0, 1), 0.0, 1e-15);
    EXPECT_NEAR(g[1](0, 0), 0.0, 1e-15);
    EXPECT_NEAR(g[1](1, 1), 0.0, 1e-15);
  }
}

TEST(Christoffel, FiniteDifferencesAgreeWithAnalytic) {
  for (const ChartMetric& m : {bump_chart(), round_sphere_chart(1.0), hyperbolic_chart(-1.0), perturbed_sphere_chart(0.01)}) {
    ASSERT_TRUE(m.has_analytic_jet()) << m.name();
    const ChartMetric fd = m.without_analytic();
    EXPECT_FALSE(fd.has_analytic_jet());
    for (int i = 0; i < 20; ++i) {
      const Vec2 u = m.name() == "revolution" || m.name() == "perturbed_sphere" ? Vec2(uniform(0.3, 2.8), uniform(-3, 3))
                                                                                 : random_in_disk(0.6);
      const Christoffel a = christoffel(m, u), b = christoffel(fd, u);
      for (int k = 0; k < 2; ++k) EXPECT_LT((a[k] - b[k]).cwiseAbs().maxCoeff(), 1e-6) << m.name();
    }
  }
}

TEST(GaussianCurvature, ConstantCurvatureCharts) {
  for (int i = 0; i < 20; ++i) {
    const Vec2 u = random_in_disk(0.8);
    EXPECT_NEAR(gaussian_curvature(round_sphere_chart(1.0), u), 1.0, 1e-10);
    EXPECT_NEAR(gaussian_curvature(round_sphere_chart(0.25), u), 0.25, 1e-10);
    EXPECT_NEAR(gaussian_curvature(hyperbolic_chart(-1.0), u), -1.0, 1e-10);
    EXPECT_NEAR(gaussian_curvature(euclidean_chart(), u), 0.0, 1e-14);
    EXPECT_NEAR(gaussian_curvature(round_sphere_chart(1.0).without_analytic(), u), 1.0, 1e-5);
  }
}

TEST(GaussianCurvature, RevolutionMatchesProfile) {
  const ChartMetric m = bump_chart();
  for (double u = 0.2; u < 3.0; u += 0.1) {
    EXPECT_NEAR(gaussian_curvature(m, Vec2(u, 1.0)), -bump_ddf(u) / bump_f(u), 1e-9);
  }
  RevolutionMetricProfile sinh;
  sinh.kind = "sinh";
  EXPECT_NEAR(gaussian_curvature(revolution_chart(sinh), Vec2(0.9, 0.2)), -1.0, 1e-10);
}

TEST(GaussianCurvature, PerturbedSphereRange) {
  const double eps = 0.004;
  const ChartMetric m = perturbed_sphere_chart(eps);
  auto f = [&](double u) { return (1 - 3 * eps) * std::sin(u) + eps * std::sin(3 * u); };
  auto ddf = [&](double u) { return -(1 - 3 * eps) * std::sin(u) - 9 * eps * std::sin(3 * u); };
  double lo = 1e9, hi = -1e9;
  for (int i = 1; i < 4000; ++i) {
    const double u = kPi * i / 4000;
    const double k = -ddf(u) / f(u);
    lo = std::min(lo, k), hi = std::max(hi, k);
    if (i % 100 == 0) EXPECT_NEAR(gaussian_curvature(m, Vec2(u, 0.3)), k, 1e-9);
  }
  EXPECT_NEAR(lo, (1 - 12 * eps) / (1 - 4 * eps), 1e-5);
  EXPECT_NEAR(hi, 1 + 24 * eps, 1e-5);
  const CurvatureBound b = sample_curvature(m, Vec2(0.05, -kPi), Vec2(kPi - 0.05, kPi));
  EXPECT_GE(b.min_k, lo - 1e-9);
  EXPECT_LE(b.max_k, hi + 1e-9);
  EXPECT_NEAR(b.min_k, lo, 1e-3);
}

TEST(Geodesics, UnitSpeedIsPreserved) {
  const ChartMetric m = perturbed_sphere_chart(0.004);
  GeodesicState st;
  st.u = Vec2(1.2, 0.0);
  const Mat2 g = m.g(st.u);
  st.du = Vec2(0.6, 0.8 / std::sqrt(g(1, 1)));
  ASSERT_NEAR(speed(m, st), 1.0, 1e-12);
  const auto path = integrate_geodesic(m, st, 2.0, 1e-3);
  for (const auto& p : path) EXPECT_NEAR(speed(m, p), 1.0, 1e-9);
  EXPECT_NEAR(path.back().s, 2.0, 1e-12);
}

TEST(Geodesics, LeavingTheChartThrows) {
  GeodesicState st;
  st.u = Vec2(0.0, 0.0);
  st.du = Vec2(2.0, 0.0);  // unit speed at the center of the Poincare disk
  try {
    geodesic_endpoint(hyperbolic_chart(-1.0), st, 50.0, 1e-2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

TEST(Distance, SphereChartMatchesGreatCircles) {
  const ChartMetric m = round_sphere_chart(1.0);
  for (int i = 0; i < 50; ++i) {
    const Vec2 a = random_in_disk(0.5), b = random_in_disk(0.5);
    const double oracle = std::acos(std::clamp(stereo_inverse(a).dot(stereo_inverse(b)), -1.0, 1.0));
    EXPECT_NEAR(chart_distance(m, a, b), oracle, 1e-6);
  }
}

TEST(Distance, HyperbolicChartMatchesModel) {
  const ChartMetric m = hyperbolic_chart(-1.0);
  ASSERT_TRUE(m.has_model_embedding());
  for (int i = 0; i < 20; ++i) {
    const Vec2 a = random_in_disk(0.4), b = random_in_disk(0.4);
    // Poincare disk distance: acosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2))).
    const double oracle = std::acosh(1 + 2 * (a - b).squaredNorm() / ((1 - a.squaredNorm()) * (1 - b.squaredNorm())));
    EXPECT_NEAR(chart_distance(m, a, b), oracle, 1e-6);
    EXPECT_NEAR(distance(m.to_model(a), m.to_model(b)), oracle, 1e-10);
  }
}

TEST(Distance, MeridiansOfRevolution) {
  const ChartMetric m = bump_chart();
  for (double u1 : {0.5, 1.0}) {
    for (double u2 : {1.3, 1.8}) EXPECT_NEAR(chart_distance(m, Vec2(u1, 0.4), Vec2(u2, 0.4)), u2 - u1, 1e-6);
  }
}

TEST(Distance, SymmetricAndFromShooting) {
  const ChartMetric m = perturbed_sphere_chart(0.004);
  for (int i = 0; i < 10; ++i) {
    const Vec2 a(uniform(0.8, 2.3), uniform(-0.6, 0.6)), b(uniform(0.8, 2.3), uniform(-0.6, 0.6));
    const double ab = chart_distance(m, a, b), ba = chart_distance(m, b, a);
    EXPECT_NEAR(ab, ba, 2e-8);
    const ChartGeodesic g = shoot_geodesic(m, a, b);
    EXPECT_LT(g.miss, 1e-10);
    GeodesicState st;
    st.u = a;
    st.du = g.initial_velocity;
    EXPECT_NEAR(speed(m, st), 1.0, 1e-9);
  }
}

TEST(GeodesicCurvature, LinesAndCircles) {
  const ChartMetric e = euclidean_chart();
  EXPECT_NEAR(geodesic_curvature(e, Vec2(0, 0), Vec2(1, 2), Vec2(0, 0)), 0.0, 1e-15);
  const ChartCurve circle = chart_oval(Vec2(0.3, 0.2), 1.0, 1.0);
  for (double t = 0; t < 6; t += 0.5) EXPECT_NEAR(geodesic_curvature(e, circle, t), 1.0, 1e-12);
  // Clockwise traversal flips the sign.
  EXPECT_NEAR(geodesic_curvature(e, Vec2(1, 0), Vec2(0, -1), Vec2(-1, 0)), -1.0, 1e-12);
}

TEST(GeodesicCurvature, EquatorOfRevolutionIsGeodesic) {
  const ChartMetric m = bump_chart();
  for (double v : {0.0, 1.0, 2.0}) {
    EXPECT_NEAR(geodesic_curvature(m, Vec2(kPi / 2, v), Vec2(0, 1), Vec2(0, 0)), 0.0, 1e-12);
  }
  // A parallel u = u0 of du^2 + f^2 dv^2 has curvature f'/f (sign by orientation).
  EXPECT_NEAR(std::abs(geodesic_curvature(m, Vec2(1.0, 0.0), Vec2(0, 1), Vec2(0, 0))), bump_df(1.0) / bump_f(1.0), 1e-12);
}

TEST(GeodesicCurvature, HyperbolicCircle) {
  const ChartMetric m = hyperbolic_chart(-1.0);
  // Euclidean radius tanh(1/2) about the disk center is the hyperbolic circle of radius 1.
  const ChartCurve c = chart_oval(Vec2(0, 0), std::tanh(0.5), std::tanh(0.5));
  for (double t = 0; t < 6; t += 0.7) EXPECT_NEAR(geodesic_curvature(m, c, t), 1.0 / std::tanh(1.0), 1e-10);
  const std::vector<Vec2> samples = metric_circle(m, Vec2(0.1, -0.2), 1.0, 1024);
  for (std::size_t i = 0; i < samples.size(); i += 128) {
    EXPECT_NEAR(geodesic_curvature(m, samples, i), 1.0 / std::tanh(1.0), 1e-4);
  }
}

TEST(GeodesicCurvature, SphereCircleFromSamples) {
  const ChartMetric m = round_sphere_chart(1.0);
  const std::vector<Vec2> samples = metric_circle(m, Vec2(0, 0), 0.8, 1024);
  for (std::size_t i = 0; i < samples.size(); i += 128) {
    EXPECT_NEAR(geodesic_curvature(m, samples, i), 1.0 / std::tan(0.8), 1e-4);
  }
  for (const Vec2& p : samples) EXPECT_NEAR(2 * std::atan(p.norm()), 0.8, 1e-8);
  // Central differences: halving the spacing divides the error by about four.
  const double coarse = geodesic_curvature(m, metric_circle(m, Vec2(0, 0), 0.8, 256), 0) - 1.0 / std::tan(0.8);
  const double fine = geodesic_curvature(m, metric_circle(m, Vec2(0, 0), 0.8, 512), 0) - 1.0 / std::tan(0.8);
  EXPECT_NEAR(coarse / fine, 4.0, 0.1);
}

TEST(Toponogov, ModelSphereIsEquality) {
  const ChartMetric m = round_sphere_chart(1.0);
  const ToponogovReport r = toponogov_check(m, 1.0, Vec2(0, 0), Vec2(0.3, 0.0), Vec2(0.1, 0.35), 1e-6);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.margin, 0.0, 1e-6);
  EXPECT_NEAR(r.curvature.min_k, 1.0, 1e-9);
}

TEST(Toponogov, WeakerBoundHasSlack) {
  const ChartMetric m = round_sphere_chart(1.0);
  const ToponogovReport r = toponogov_check(m, 0.5, Vec2(0, 0), Vec2(0.3, 0.0), Vec2(0.1, 0.35), 1e-6);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.margin, 1e-4);
  EXPECT_NEAR(r.model_side, model_third_side(Curvature(0.5), r.side_xy, r.side_xz, r.angle_x), 1e-12);
}

TEST(Toponogov, RevolutionTrianglesRespectLowerBound) {
  const ChartMetric m = bump_chart();
  double kmin = 1e9;
  for (int i = 1; i < 2000; ++i) {
    const double u = 0.6 + 1.9 * i / 2000;
    kmin = std::min(kmin, -bump_ddf(u) / bump_f(u));
  }
  for (int i = 0; i < 50; ++i) {
    auto pick = [] { return Vec2(uniform(1.0, 2.1), uniform(-0.5, 0.5)); };
    const Vec2 x = pick(), y = pick(), z = pick();
    if ((x - y).norm() < 0.05 || (x - z).norm() < 0.05) continue;
    const ToponogovReport r = toponogov_check(m, kmin - 1e-3, x, y, z, 1e-6, {}, 64);
    EXPECT_TRUE(r.passed) << r.margin;
  }
}

TEST(Toponogov, RejectsOverstatedCurvature) {
  const ChartMetric m = round_sphere_chart(1.0);
  try {
    toponogov_check(m, 1.5, Vec2(0, 0), Vec2(0.3, 0.0), Vec2(0.1, 0.35), 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCertification);
  }
}

TEST(Rolling2d, SphereCircleIsItsOwnBall) {
  const ChartMetric m = round_sphere_chart(1.0);
  const double r = 0.6, rho = std::tan(r / 2);
  const ChartCurve c = chart_oval(Vec2(0, 0), rho, rho);
  Rolling2dOptions opt;
  opt.curve_samples = 128;
  const Rolling2dReport rep = verify_ball_rolling_2d(m, 1.0, c, 0.0, {0, 40, 90}, 1e-5, opt);
  EXPECT_NEAR(rep.lambda, 1.0 / std::tan(r), 1e-8);
  EXPECT_NEAR(rep.R_lambda, r, 1e-8);
  EXPECT_NEAR(rep.min_margin, 0.0, 1e-5);
  EXPECT_TRUE(rep.passed);
  for (const Rolling2dSeed& s : rep.seeds) EXPECT_NEAR(s.center.norm(), 0.0, 1e-6);
}

TEST(Rolling2d, OvalOnPerturbedSphere) {
  const ChartMetric m = perturbed_sphere_chart(0.004);
  const ChartCurve c = chart_oval(Vec2(kPi / 2, 0.0), 0.35, 0.45);
  Rolling2dOptions opt;
  opt.curve_samples = 128;
  const Rolling2dReport rep = verify_ball_rolling_2d(m, 0.9, c, 0.0, {0, 32, 64, 96}, 1e-5, opt);
  EXPECT_TRUE(rep.passed);
  EXPECT_GE(rep.min_margin, -1e-5);
  EXPECT_GT(rep.lambda, 0.0);
}

TEST(Rolling2d, OverstatedCurvatureIsRejected) {
  const ChartMetric m = perturbed_sphere_chart(0.004);
  const ChartCurve c = chart_oval(Vec2(kPi / 2, 0.0), 0.35, 0.45);
  try {
    verify_ball_rolling_2d(m, 1.1, c, 0.0, {0}, 1e-5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCertification);
  }
}

}  // namespace
}  // namespace rollkit
