#pragma once

// Two-dimensional Riemannian metrics on a chart: Christoffel symbols, Gaussian
// curvature, geodesics, chart distances by shooting, geodesic curvature of
// curves, Toponogov hinge comparison and ball rolling with sec >= c.

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rollkit/model_space.hpp"

namespace rollkit {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct MetricJet {
  Mat2 g;
  std::array<Mat2, 2> dg;   // dg[k] = d g / du_k
  std::array<Mat2, 3> ddg;  // d^2 g / du0^2, du0 du1, du1^2
};

// Gamma[k](i, j) = Gamma^k_ij
using Christoffel = std::array<Mat2, 2>;

class ChartMetric {
 public:
  struct Parts {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    std::function<Mat2(const Vec2&)> metric;
    std::function<MetricJet(const Vec2&)> analytic_jet;         // optional
    std::function<double(const Vec2&)> analytic_curvature;      // optional
    std::function<bool(const Vec2&)> in_domain;
    // Isometric embedding into a model space, when the chart is one (used as an oracle).
    std::function<ModelPoint(const Vec2&)> to_model;            // optional
    double diameter_cap = 1.0;  // regions kept below this size so geodesics are unique
    double fd_step = 1e-4;
  };

  explicit ChartMetric(Parts parts);

  const std::string& name() const { return parts_->name; }
  const std::vector<std::pair<std::string, double>>& params() const { return parts_->params; }
  double diameter_cap() const { return parts_->diameter_cap; }
  bool in_domain(const Vec2& u) const { return parts_->in_domain(u); }
  bool has_analytic_jet() const { return bool(parts_->analytic_jet); }
  bool has_model_embedding() const { return bool(parts_->to_model); }
  ModelPoint to_model(const Vec2& u) const;

  Mat2 g(const Vec2& u) const;
  MetricJet jet(const Vec2& u) const;  // analytic when available
  MetricJet finite_difference_jet(const Vec2& u) const;
  ChartMetric without_analytic() const;

 private:
  std::shared_ptr<const Parts> parts_;
};

ChartMetric euclidean_chart();
// Stereographic chart of the sphere of curvature c > 0: g = 4 / (1 + c|u|^2)^2 I.
ChartMetric round_sphere_chart(double c = 1.0);
// Poincare disk of curvature c < 0: g = 4 / (1 + c|u|^2)^2 I on |u| < 1/sqrt(-c).
ChartMetric hyperbolic_chart(double c = -1.0);

// Surface of revolution du^2 + f(u)^2 dv^2 with f(u) = sum_k a_k sin(k u) on u in (0, pi)
// or f = sinh(u) on u > 0 (hyperbolic plane in polar form).
struct RevolutionMetricProfile {
  std::string kind = "sine_series";  // "sine_series" or "sinh"
  std::vector<std::pair<int, double>> sine_terms = {{1, 1.0}};
};
ChartMetric revolution_chart(const RevolutionMetricProfile& profile);
// Smooth perturbation of the unit sphere, f = (1 - 3 eps) sin u + eps sin 3u
// (regular at both poles); K ranges over [(1 - 12 eps)/(1 - 4 eps), 1 + 24 eps].
ChartMetric perturbed_sphere_chart(double eps);

Christoffel christoffel(const MetricJet& j);
Christoffel christoffel(const ChartMetric& metric, const Vec2& u);
double gaussian_curvature(const MetricJet& j);
double gaussian_curvature(const ChartMetric& metric, const Vec2& u);

struct GeodesicState {
  Vec2 u = Vec2::Zero();
  Vec2 du = Vec2::Zero();
  double s = 0.0;
};

double speed(const ChartMetric& metric, const GeodesicState& st);
// RK4 path with constant step; throws kDomain if the path leaves the chart.
std::vector<GeodesicState> integrate_geodesic(const ChartMetric& metric, const GeodesicState& start, double length,
                                              double step);
// Endpoint only.
GeodesicState geodesic_endpoint(const ChartMetric& metric, const GeodesicState& start, double length, double step);

struct ShootingOptions {
  double miss_tol = 1e-10;  // endpoint miss in chart coordinates
  double step = 4e-3;       // arclength step of the integrator
  int max_newton = 30;
  int sweep_samples = 720;
};

struct ChartGeodesic {
  double length = 0.0;
  Vec2 initial_velocity;  // unit, at a
  Vec2 final_velocity;    // unit, at b
  double miss = 0.0;
  int iterations = 0;
  bool used_sweep = false;
};

// Boundary-value geodesic a -> b by shooting on the initial velocity.
ChartGeodesic shoot_geodesic(const ChartMetric& metric, const Vec2& a, const Vec2& b,
                             const ShootingOptions& options = {}, const Vec2* guess = nullptr);
double chart_distance(const ChartMetric& metric, const Vec2& a, const Vec2& b, const ShootingOptions& options = {});

// Closed chart curve with analytic parameter derivatives.
struct ChartCurve {
  std::function<Vec2(double)> x, dx, ddx;
  double period = 2.0 * 3.14159265358979323846;
};
// Ellipse-like oval u = u0 + a cos(theta), v = v0 + b sin(theta).
ChartCurve chart_oval(const Vec2& center, double a, double b);
// Metric circle exp_center(r e(theta)) with e(theta) a g-orthonormal frame rotation.
std::vector<Vec2> metric_circle(const ChartMetric& metric, const Vec2& center, double r, int samples,
                                double step = 1e-3);

// Signed geodesic curvature g(D_T T, N) with N the left normal (inward for a
// counter-clockwise curve in a positively oriented chart).
double geodesic_curvature(const ChartMetric& metric, const Vec2& x, const Vec2& dx, const Vec2& ddx);
double geodesic_curvature(const ChartMetric& metric, const ChartCurve& curve, double theta);
// Same from periodic samples of a closed curve (uniform parameter, central differences).
double geodesic_curvature(const ChartMetric& metric, const std::vector<Vec2>& samples, std::size_t i);
// Same from an open polyline (uniform parameter); i must be interior.
double geodesic_curvature_open(const ChartMetric& metric, const std::vector<Vec2>& samples, std::size_t i);

// Unit left normal of a chart direction.
Vec2 left_normal(const ChartMetric& metric, const Vec2& u, const Vec2& dir);
double metric_angle(const ChartMetric& metric, const Vec2& u, const Vec2& a, const Vec2& b);

struct CurvatureBound {
  double min_k = 0.0;
  double max_k = 0.0;
  Vec2 argmin;
  int samples_per_axis = 0;
};
// Dense sampling of K over the box [lo, hi].
CurvatureBound sample_curvature(const ChartMetric& metric, const Vec2& lo, const Vec2& hi, int n = 256);
// Throws kCertification "hypothesis sec >= c violated on region" when min K < c - tol.
CurvatureBound certify_curvature_lower_bound(const ChartMetric& metric, double c, const Vec2& lo, const Vec2& hi,
                                             double tol, int n = 256);

struct ToponogovReport {
  double side_xy = 0.0, side_xz = 0.0, side_yz = 0.0;
  double angle_x = 0.0;
  double model_side = 0.0;  // comparison third side in M(c)
  double margin = 0.0;      // model_side - side_yz
  double tolerance = 0.0;
  CurvatureBound curvature;
  bool passed = false;
};
ToponogovReport toponogov_check(const ChartMetric& metric, double c, const Vec2& x, const Vec2& y, const Vec2& z,
                                double tol, const ShootingOptions& options = {}, int curvature_samples = 256);

struct Rolling2dSeed {
  std::size_t seed_index = 0;  // curve sample index
  Vec2 center;
  double max_distance = 0.0;
  std::size_t argmax = 0;
  double margin = 0.0;  // R_lambda - max_distance
  bool passed = false;
};

struct Rolling2dReport {
  double lambda = 0.0;
  double R_lambda = 0.0;
  double min_geodesic_curvature = 0.0;
  CurvatureBound curvature;
  std::vector<Rolling2dSeed> seeds;
  double min_margin = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Rolling2dOptions {
  int curve_samples = 256;
  int curvature_samples = 256;
  double region_padding = 0.0;  // extra margin around the curve's bounding box
  ShootingOptions shooting;
};

// lambda <= 0 selects lambda = min geodesic curvature over the samples.
Rolling2dReport verify_ball_rolling_2d(const ChartMetric& metric, double c, const ChartCurve& curve, double lambda,
                                       const std::vector<std::size_t>& seeds, double tol,
                                       const Rolling2dOptions& options = {});

}  // namespace rollkit
