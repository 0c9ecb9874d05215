#include "rollkit/rolling.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rollkit {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ModelPoint> grid_points(const BodySpec& body, const Grid& g) {
  std::vector<ModelPoint> pts;
  pts.reserve(g.params.size());
  for (const auto& u : g.params) pts.push_back(body.point(u));
  return pts;
}

// Coordinates of a tangent vector at p in the frame returned by tangent_frame.
Eigen::VectorXd frame_coords(const ModelPoint& p, const std::vector<Vec>& frame, const Vec& v) {
  Eigen::VectorXd x(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) x[k] = ambient_dot(p.curvature, frame[k], v);
  return x;
}

}  // namespace

std::vector<Params> spread_seeds(const BodySpec& body, std::size_t count) {
  const Grid& g = body.grid();
  std::vector<Params> seeds;
  if (count == 0) return seeds;
  const std::size_t n = g.params.size();
  if (body.chart_dim() == 1) {
    for (std::size_t k = 0; k < count; ++k) seeds.push_back(g.params[(k * n) / count]);
    return seeds;
  }
  // Polar grids are stored row by row; spread rows evenly and columns by the golden ratio.
  const std::size_t cols = std::size_t(g.resolution);
  const std::size_t rows = n / cols;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t row = std::min(rows - 1, std::size_t((k + 0.5) * rows / count));
    const double frac = std::fmod(k * golden, 1.0);
    const std::size_t col = std::min(cols - 1, std::size_t(frac * cols));
    seeds.push_back(g.params[row * cols + col]);
  }
  return seeds;
}

std::vector<RollingResult> verify_ball_rolling(const BodySpec& body, double lambda,
                                               const ConvexityCertificate& certificate,
                                               const std::vector<Params>& seeds, const RollingOptions& options) {
  if (!certificate.passed || certificate.lambda < lambda) {
    fail(ErrorCode::kCertification, "body not certified lambda-convex");
  }
  const Curvature& c = body.curvature();
  const double R = characteristic_radius(c, lambda);
  const Grid& g = body.grid();
  const std::vector<ModelPoint> pts = grid_points(body, g);
  const double contact_tol = options.contact_tol_rel * R;
  const double eps = options.key_epsilon_rel * R;

  std::vector<std::size_t> key_idx;
  const std::size_t key_n = std::min(options.key_samples, pts.size());
  for (std::size_t k = 0; k < key_n; ++k) key_idx.push_back((k * pts.size()) / key_n);
  std::vector<ModelPoint> key_interior;
  for (std::size_t i : key_idx) {
    const CurvatureSample s = curvature_sample(body, g.params[i]);
    key_interior.push_back(exp_map({s.point, eps * s.inward_normal.vec}));
  }

  std::vector<RollingResult> out;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const CurvatureSample s = curvature_sample(body, seeds[k]);
    RollingResult r;
    r.seed_index = k;
    r.seed = seeds[k];
    r.center = exp_map({s.point, R * s.inward_normal.vec});
    r.margins.resize(pts.size());
    r.min_margin = std::numeric_limits<double>::infinity();
    r.off_seed_normalized_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double m = R - distance(r.center, pts[i]);
      r.margins[i] = m;
      if (m < r.min_margin) {
        r.min_margin = m;
        r.argmin = i;
      }
      if (std::abs(m) <= contact_tol) r.contact_set.push_back(i);
      const double from_seed = distance(s.point, pts[i]);
      if (from_seed > 1e-9 * std::max(1.0, R)) {
        r.off_seed_normalized_margin = std::min(r.off_seed_normalized_margin, 2.0 * m / (from_seed * from_seed));
      }
    }
    r.key_inequality_excess = -std::numeric_limits<double>::infinity();
    for (const ModelPoint& p : key_interior) {
      r.key_inequality_excess = std::max(r.key_inequality_excess, distance(r.center, p) + eps - R);
    }
    r.passed = r.min_margin >= -options.tol;
    out.push_back(std::move(r));
  }
  return out;
}

// ---- rigidity -------------------------------------------------------------------

std::string to_string(RigidityAlternative a) {
  switch (a) {
    case RigidityAlternative::kFullContact: return "i";
    case RigidityAlternative::kContactCone: return "ii";
    case RigidityAlternative::kNone: break;
  }
  return "none";
}

namespace {

double worst_pairing(const std::vector<Eigen::Vector3d>& v, const Eigen::Vector3d& w) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& x : v) worst = std::max(worst, -w.dot(x));
  return worst;
}

// Projected subgradient descent of max_i -<w, v_i> on the unit sphere.
Eigen::Vector3d descend(const std::vector<Eigen::Vector3d>& v, Eigen::Vector3d w) {
  double best = worst_pairing(v, w);
  Eigen::Vector3d best_w = w;
  for (int it = 0; it < 200; ++it) {
    std::size_t arg = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double val = -w.dot(v[i]);
      if (val > worst) worst = val, arg = i;
    }
    if (worst < best) best = worst, best_w = w;
    w = (w + (0.5 / (1.0 + it)) * v[arg]).normalized();
  }
  return best_w;
}

}  // namespace

RigidityProbe rigidity_probe(const BodySpec& body, const RollingResult& result, double half_space_tol,
                             double seed_cone) {
  RigidityProbe probe;
  probe.contacts = result.contact_set.size();
  const Grid& g = body.grid();
  const ModelPoint& center = result.center;
  const std::vector<Vec> frame = tangent_frame(center);
  const Eigen::VectorXd seed_dir = frame_coords(center, frame, log_map(center, body.point(result.seed)).vec).normalized();

  std::vector<Eigen::VectorXd> dirs;
  bool beyond_seed = false;
  for (std::size_t i : result.contact_set) {
    const Eigen::VectorXd v = frame_coords(center, frame, log_map(center, body.point(g.params[i])).vec).normalized();
    if (std::acos(std::clamp(v.dot(seed_dir), -1.0, 1.0)) > seed_cone) beyond_seed = true;
    dirs.push_back(v);
  }
  if (!beyond_seed) {
    probe.alternative = RigidityAlternative::kNone;
    probe.separation_value = -1.0;
    return probe;
  }
  const int m = body.dim();
  if (dirs.size() <= std::size_t(m)) {
    probe.alternative = RigidityAlternative::kContactCone;
    probe.separation_value = -1.0;
    return probe;
  }

  if (m == 2) {
    std::vector<double> ang;
    for (const auto& v : dirs) ang.push_back(std::atan2(v[1], v[0]));
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * kPi - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    probe.max_angular_gap = gap;
    // Best w sits opposite the middle of the largest gap.
    probe.separation_value = std::cos(0.5 * gap);
  } else {
    std::vector<Eigen::Vector3d> v;
    for (const auto& d : dirs) v.emplace_back(d[0], d[1], d[2]);
    // Farthest-point subsample for the candidate normals.
    std::vector<std::size_t> sub = {0};
    std::vector<double> gap(v.size(), std::numeric_limits<double>::infinity());
    while (sub.size() < std::min<std::size_t>(64, v.size())) {
      std::size_t arg = 0;
      double far = -1.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        gap[i] = std::min(gap[i], (v[i] - v[sub.back()]).norm());
        if (gap[i] > far) far = gap[i], arg = i;
      }
      sub.push_back(arg);
    }
    std::vector<Eigen::Vector3d> vs;
    for (std::size_t i : sub) vs.push_back(v[i]);
    std::vector<Eigen::Vector3d> candidates;
    for (std::size_t a = 0; a < vs.size(); ++a) {
      candidates.push_back(vs[a]);
      for (std::size_t b = a + 1; b < vs.size(); ++b) {
        const Eigen::Vector3d n = vs[a].cross(vs[b]);
        if (n.norm() < 1e-12) continue;
        candidates.push_back(n.normalized());
        candidates.push_back(-n.normalized());
      }
    }
    double best_sub = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_w = candidates.front();
    for (const auto& w : candidates) {
      const double val = worst_pairing(vs, w);
      if (val < best_sub) best_sub = val, best_w = w;
    }
    double best = worst_pairing(v, best_w);
    // Multi-start refinement on the full contact set (Fibonacci starts).
    std::vector<Eigen::Vector3d> starts = {best_w};
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < 20; ++k) {
      const double z = 1.0 - (k + 0.5) / 10.0;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      starts.emplace_back(rad * std::cos(golden * k), rad * std::sin(golden * k), z);
    }
    for (const auto& s : starts) best = std::min(best, worst_pairing(v, descend(v, s)));
    // A subsample lower-bounds the full value, so a positive subsample value is decisive.
    probe.separation_value = best_sub > half_space_tol ? best_sub : best;
  }
  probe.alternative = probe.separation_value > half_space_tol ? RigidityAlternative::kFullContact
                                                              : RigidityAlternative::kContactCone;
  return probe;
}

// ---- diameter -------------------------------------------------------------------

DiameterCheck verify_diameter(const BodySpec& body, double lambda, double tol, int resolution) {
  const Curvature& c = body.curvature();
  DiameterCheck r;
  if (resolution <= 0) resolution = body.chart_dim() == 1 ? body.grid().resolution : std::min(64, body.grid().resolution);
  r.resolution = resolution;
  const Grid g = body.grid_at(resolution);
  const std::vector<ModelPoint> pts = grid_points(body, g);
  // Distance is monotone in the chord (c >= 0) or in -<p,q> (c < 0).
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double key = c.sign() < 0 ? -ambient_dot(c, pts[i].coords, pts[j].coords)
                                      : (pts[i].coords - pts[j].coords).squaredNorm();
      if (key > best) best = key, r.i = i, r.j = j;
    }
  }
  r.diameter = pts.size() > 1 ? distance(pts[r.i], pts[r.j]) : 0.0;
  r.bound = 2.0 * characteristic_radius(c, lambda);
  r.margin = r.bound - r.diameter;
  r.model_bound = model_diameter(c);
  r.model_margin = r.model_bound - r.diameter;
  r.passed = r.margin >= -tol && (c.sign() <= 0 || r.model_margin >= -tol);
  return r;
}

// ---- volume ---------------------------------------------------------------------

namespace {

// Integral of sn_c^(m-1) from 0 to rho.
double radial_volume(const Curvature& c, int m, double rho) {
  const double k = c.scale();
  const double x = k * rho;
  if (m == 2) {
    if (c.sign() == 0) return 0.5 * rho * rho;
    const double h = c.sign() > 0 ? std::sin(0.5 * x) : std::sinh(0.5 * x);
    return 2.0 * h * h / (k * k);
  }
  if (c.sign() == 0) return rho * rho * rho / 3.0;
  if (c.sign() > 0) return (x - std::sin(x) * std::cos(x)) / (2.0 * k * k * k);
  return (std::sinh(x) * std::cosh(x) - x) / (2.0 * k * k * k);
}

}  // namespace

EnclosedMeasure enclosed_measure(const BodySpec& body, const Grid& grid) {
  const Curvature& c = body.curvature();
  const int m = body.dim();
  const ModelPoint& w = body.witness();
  const std::vector<Vec> frame = tangent_frame(w);
  EnclosedMeasure out;
  for (std::size_t idx = 0; idx < grid.params.size(); ++idx) {
    const ChartJet j = body.jet(grid.params[idx]);
    const ModelPoint x{j.point, c};
    const Vec v = log_map(w, x).vec;
    const double rho = ambient_norm(c, v);
    const Vec e = v / rho;
    const double s = sn(c, rho);
    const Vec radial = c.sign() == 0 ? e : Vec(-c.value() * s * w.coords + cs(c, rho) * e);
    const double wt = grid.weights[idx];

    std::vector<Vec> tangents;
    for (const Vec& d : j.d1) tangents.push_back(project_to_tangent(x, d));
    SmallMat G(m - 1, m - 1);
    for (int a = 0; a < m - 1; ++a)
      for (int b = 0; b < m - 1; ++b) G(a, b) = ambient_dot(c, tangents[a], tangents[b]);
    out.boundary += wt * std::sqrt(std::max(0.0, G.determinant()));

    // Angular velocity of the direction e(u) in T_w M.
    const Eigen::VectorXd ef = frame_coords(w, frame, e);
    std::vector<Eigen::VectorXd> de;
    for (const Vec& t : tangents) {
      const Vec across = t - ambient_dot(c, t, radial) * radial;
      // `across` is sn(rho) times the variation of e (already orthogonal to w and e).
      de.push_back(frame_coords(w, frame, across) / s);
    }
    double jac = 0.0;
    if (m == 2) {
      jac = ef[0] * de[0][1] - ef[1] * de[0][0];
    } else {
      Eigen::Matrix3d M;
      M.col(0) = ef;
      M.col(1) = de[0];
      M.col(2) = de[1];
      jac = M.determinant();
    }
    out.volume += wt * radial_volume(c, m, rho) * jac;
  }
  out.volume = std::abs(out.volume);
  return out;
}

VolumeCheck verify_volume(const BodySpec& body, double lambda, double tol_rel, double quad_tol) {
  const Curvature& c = body.curvature();
  const int m = body.dim();
  const double R = characteristic_radius(c, lambda);
  const EnclosedMeasure fine = enclosed_measure(body, body.grid());
  const EnclosedMeasure coarse = enclosed_measure(body, body.grid_at(std::max(4, body.grid().resolution / 2)));
  VolumeCheck r;
  r.volume = fine.volume;
  r.boundary_measure = fine.boundary;
  r.volume_error = std::abs(fine.volume - coarse.volume) / fine.volume;
  r.boundary_error = std::abs(fine.boundary - coarse.boundary) / fine.boundary;
  if (r.volume_error > quad_tol || r.boundary_error > quad_tol) {
    fail(ErrorCode::kNumerical, "volume quadrature did not converge (halved-grid estimate above tolerance)");
  }
  r.ball_volume = ball_volume(c, m, R);
  r.sphere_area = sphere_area(c, m, R);
  r.volume_margin_rel = 1.0 - r.volume / r.ball_volume;
  r.boundary_margin_rel = 1.0 - r.boundary_measure / r.sphere_area;
  r.passed = r.volume_margin_rel >= -tol_rel && r.boundary_margin_rel >= -tol_rel;
  return r;
}

// ---- counterexample -------------------------------------------------------------

CounterexampleReport tangent_ball_penetration(const BodySpec& hull, double radius, double tol) {
  CounterexampleReport r;
  r.radius = radius;
  r.tolerance = tol;
  const Params s = two_ball_hull_closest_param(hull);
  const CurvatureSample cs = curvature_sample(hull, s);
  r.tangent_point = cs.point;
  r.ball_center = exp_map({cs.point, radius * cs.inward_normal.vec});
  const Grid& g = hull.grid();
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.params.size(); ++i) {
    const double d = distance(r.ball_center, hull.point(g.params[i]));
    if (d < nearest) nearest = d, r.deepest = i;
  }
  r.penetration = std::max(0.0, radius - nearest);
  r.confirmed = r.penetration > tol;
  return r;
}

CounterexampleReport counterexample_two_ball_hull(const Curvature& c, double lambda, double separation,
                                                  double smoothing, double tol, int resolution) {
  const double R = characteristic_radius(c, lambda);
  const BodySpec hull = make_two_ball_hull(c, R, separation, smoothing, resolution);
  CounterexampleReport r = tangent_ball_penetration(hull, R, tol);
  r.separation = separation;
  return r;
}

}  // namespace rollkit
