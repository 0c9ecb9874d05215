#pragma once

// Smooth closed hypersurfaces of M(c) given by a chart, plus the curvature
// machinery needed to certify lambda-convexity on a sampling grid.

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rollkit/model_space.hpp"

namespace rollkit {

inline constexpr int kMaxChartDim = 7;
using Params = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxChartDim, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxChartDim, kMaxChartDim>;

// Position and parameter derivatives of the chart at one point.
struct ChartJet {
  Vec point;
  std::vector<Vec> d1;  // d1[i] = dX/du_i
  std::vector<Vec> d2;  // d2[i * n + j] = d^2X/du_i du_j
};

struct Grid {
  std::vector<Params> params;
  std::vector<double> weights;  // parameter-space quadrature weights (sum = |U|)
  int resolution = 0;
};

// Numeric description of where the body came from; used for scenario files and plots.
struct BodyDescriptor {
  std::string generator;
  std::vector<std::pair<std::string, double>> params;
};

class BodySpec {
 public:
  using ChartFn = std::function<Vec(const Params&)>;
  using JetFn = std::function<ChartJet(const Params&)>;
  using GridFn = std::function<Grid(int)>;

  struct Parts {
    Curvature curvature;
    int dim = 2;
    ChartFn chart;
    JetFn analytic_jet;  // optional
    GridFn grid_factory;
    int default_resolution = 256;
    std::vector<bool> periodic;         // per parameter
    std::vector<double> lower, upper;   // parameter box
    ModelPoint witness;                 // interior point, fixes the inward orientation
    double fd_step = 1e-4;
    BodyDescriptor descriptor;
  };

  explicit BodySpec(Parts parts);

  const Curvature& curvature() const { return parts_->curvature; }
  int dim() const { return parts_->dim; }
  int chart_dim() const { return parts_->dim - 1; }
  const ModelPoint& witness() const { return parts_->witness; }
  const BodyDescriptor& descriptor() const { return parts_->descriptor; }
  double fd_step() const { return parts_->fd_step; }
  bool has_analytic_jet() const { return bool(parts_->analytic_jet); }

  ModelPoint point(const Params& u) const;
  // Analytic jet when the generator supplies one, central differences otherwise.
  ChartJet jet(const Params& u) const;
  ChartJet finite_difference_jet(const Params& u, double h) const;

  const Grid& grid() const { return grid_; }
  Grid grid_at(int resolution) const { return parts_->grid_factory(resolution); }
  BodySpec with_resolution(int resolution) const;
  BodySpec with_fd_step(double h) const;

  // Wraps periodic parameters and reports whether u is inside the chart box.
  Params wrap(const Params& u) const;
  bool in_domain(const Params& u) const;

 private:
  std::shared_ptr<const Parts> parts_;
  Grid grid_;
};

struct CurvatureSample {
  ModelPoint point;
  TangentVector inward_normal;
  std::vector<Vec> tangents;  // projected chart derivatives
  SmallMat first_form;        // G
  SmallMat second_form;       // B
  std::vector<double> shape_eigenvalues;
  double kappa_min = 0.0;
};

TangentVector unit_inward_normal(const BodySpec& body, const Params& u);
SmallMat second_fundamental_form(const BodySpec& body, const Params& u);
CurvatureSample curvature_sample(const BodySpec& body, const Params& u);
// Rayleigh quotient B(w,w)/G(w,w) for a chart direction w.
double normal_curvature(const BodySpec& body, const Params& u, const Params& w);
double normal_curvature(const CurvatureSample& sample, const Params& w);

struct ConvexityCertificate {
  double lambda = 0.0;
  double tolerance = 0.0;
  double min_kappa = 0.0;
  std::size_t argmin = 0;
  Params argmin_params;
  double margin = 0.0;  // min_kappa - lambda
  bool passed = false;
};

ConvexityCertificate certify_lambda_convex(const BodySpec& body, double lambda, double tol);

// ---- generators -------------------------------------------------------------

// Geodesic sphere of radius r about exp_origin(center_offset).
BodySpec make_geodesic_sphere(const Curvature& c, int m, double radius, const Vec& center_offset = Vec(),
                              int resolution = 0);
// Image under exp at the model origin of the Euclidean ellipse/ellipsoid with the given semi-axes.
BodySpec make_ellipse_like(const Curvature& c, const std::vector<double>& axes, int resolution = 0);

// Star-shaped body about the model origin with polar radius
// r(theta) = r0 + sum_k a_k cos(k theta); for m = 3 theta is the polar angle
// and the profile is rotated about the last axis.
struct RevolutionProfile {
  double r0 = 0.5;
  std::vector<std::pair<int, double>> harmonics;
};
BodySpec make_revolution_body(const Curvature& c, int m, const RevolutionProfile& profile, int resolution = 0);

// Boundary of the convex hull of two radius-r balls whose centers are
// `separation` apart, symmetric about the model origin. For c < 0 it is the
// hyperbolic hull used for the inner-rolling counterexample, for c = 0 a stadium.
// smoothing > 0 replaces the curvature jumps by linear ramps of that arclength.
BodySpec make_two_ball_hull(const Curvature& c, double radius, double separation, double smoothing = 0.0,
                            int resolution = 0);

// Point on the hull boundary closest to the model origin (midpoint of a flat side).
Params two_ball_hull_closest_param(const BodySpec& hull);

}  // namespace rollkit
