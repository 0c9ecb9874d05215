#include "rollkit/radial_angle.hpp"

#include <Eigen/Cholesky>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rollkit {

namespace {

constexpr double kPi = std::numbers::pi;

double distance_at(const BodySpec& body, const ModelPoint& p, const Params& u) {
  return distance(p, body.point(u));
}

// Distance from p and the chart gradient of that distance.
struct DistanceField {
  double t = 0.0;
  Params grad;      // dt/du_i
  SmallMat metric;  // first fundamental form
};

DistanceField distance_field(const BodySpec& body, const ModelPoint& p, const Params& u) {
  const Curvature& c = body.curvature();
  const ChartJet j = body.jet(u);
  const ModelPoint q{j.point, c};
  const TangentVector back = log_map(q, p);
  DistanceField f;
  f.t = norm(back);
  if (!(f.t > 0.0)) fail(ErrorCode::kDomain, "boundary point coincides with the origin");
  const Vec z = -back.vec / f.t;  // unit gradient of the distance at q
  const int n = body.chart_dim();
  f.grad = Params(n);
  f.metric = SmallMat(n, n);
  std::vector<Vec> tangents;
  for (const Vec& d : j.d1) tangents.push_back(project_to_tangent(q, d));
  for (int a = 0; a < n; ++a) {
    f.grad[a] = ambient_dot(c, z, tangents[a]);
    for (int b = 0; b < n; ++b) f.metric(a, b) = ambient_dot(c, tangents[a], tangents[b]);
  }
  return f;
}

// Unit (in the first fundamental form) chart direction of increasing distance.
bool ascent_direction(const DistanceField& f, Params& dir) {
  const Params raw = f.metric.ldlt().solve(f.grad);
  const double len2 = f.grad.dot(raw);
  if (!(len2 > 0.0)) return false;
  dir = raw / std::sqrt(len2);
  return true;
}

}  // namespace

// ---- origin -------------------------------------------------------------------

Origin locate_origin(const BodySpec& body, const ModelPoint& p) {
  const Grid& g = body.grid();
  Origin o;
  o.p = p;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.params.size());
  for (std::size_t i = 0; i < g.params.size(); ++i) {
    dist[i] = distance_at(body, p, g.params[i]);
    if (dist[i] < best) {
      best = dist[i];
      o.foot_index = i;
    }
  }
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (i != o.foot_index && dist[i] <= best + 1e-12 * std::max(1.0, best)) ++o.ties;

  Params u = g.params[o.foot_index];
  const int n = body.chart_dim();
  const double spacing = (n == 1 ? 2.0 * kPi : kPi) / g.resolution;
  const int sweeps = n == 1 ? 1 : 12;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int k = 0; k < n; ++k) {
      auto along = [&](double x) {
        Params v = u;
        v[k] = x;
        return distance_at(body, p, v);
      };
      double lo = u[k] - 2.0 * spacing, hi = u[k] + 2.0 * spacing;
      if (n > 1 && k == 0) {
        lo = std::max(lo, 1e-9);
        hi = std::min(hi, kPi - 1e-9);
      }
      const auto r = boost::math::tools::brent_find_minima(along, lo, hi, 52);
      if (r.second < best) {
        best = r.second;
        u[k] = r.first;
      }
    }
  }
  o.foot = body.wrap(u);
  o.d = best;
  return o;
}

// ---- radial angle -------------------------------------------------------------

double radial_angle(const CurvatureSample& sample, const ModelPoint& p) {
  const TangentVector back = log_map(sample.point, p);
  if (!(norm(back) > 0.0)) fail(ErrorCode::kDomain, "radial angle undefined at the origin");
  // angle(-back, -nu) == angle(back, nu)
  return angle(back, sample.inward_normal);
}

double radial_angle(const BodySpec& body, const ModelPoint& p, const Params& u) {
  return radial_angle(curvature_sample(body, u), p);
}

GradientResiduals gradient_decomposition_check(const BodySpec& body, const ModelPoint& p, const Params& u) {
  const Curvature& c = body.curvature();
  const CurvatureSample s = curvature_sample(body, u);
  const TangentVector back = log_map(s.point, p);
  const double t = norm(back);
  if (!(t > 0.0)) fail(ErrorCode::kDomain, "radial angle undefined at the origin");
  const Vec z = -back.vec / t;
  const Vec& nu = s.inward_normal.vec;
  const double zn = ambient_dot(c, z, nu);
  const Vec tangential = z - zn * nu;

  GradientResiduals r;
  r.phi = angle(back, s.inward_normal);
  r.tangential_norm = ambient_norm(c, tangential);
  r.tangential_residual = r.tangential_norm - std::sin(r.phi);
  r.normal_residual = zn + std::cos(r.phi);
  return r;
}

// ---- trajectories -------------------------------------------------------------

Trajectory integrate_trajectory(const BodySpec& body, const ModelPoint& p, const Params& u0,
                                TrajectoryDirection direction, const TrajectoryOptions& options) {
  if (!(options.step > 0.0)) fail(ErrorCode::kInvalidInput, "trajectory step must be positive");
  const double sign = direction == TrajectoryDirection::kIncreasing ? 1.0 : -1.0;
  const int n = body.chart_dim();

  auto usable = [&](const Params& u) {
    if (!body.in_domain(u)) return false;
    if (n > 1 && (u[0] < 1e-3 || u[0] > kPi - 1e-3)) return false;  // polar chart singularity
    return true;
  };
  auto field = [&](const Params& u, Params& dir) {
    if (!usable(u)) return false;
    if (!ascent_direction(distance_field(body, p, u), dir)) return false;
    dir *= sign;
    return true;
  };
  auto record = [&](double s, const Params& u, const Params& dir) {
    TrajectorySample ts;
    ts.s = s;
    ts.u = body.wrap(u);
    const CurvatureSample cs = curvature_sample(body, u);
    ts.coords = cs.point.coords;
    ts.t = distance(p, cs.point);
    ts.phi = radial_angle(cs, p);
    ts.direction = dir;
    return ts;
  };

  Trajectory traj;
  traj.direction = direction;
  traj.nominal_step = options.step;
  Params u = u0, dir;
  if (!field(u, dir)) fail(ErrorCode::kDomain, "trajectory start has no gradient direction");
  traj.samples.push_back(record(0.0, u, dir));
  if (!(traj.samples.back().phi > options.phi_floor)) {
    fail(ErrorCode::kDomain, "trajectory start is already below the radial angle floor");
  }

  double h = options.step;
  double s = 0.0;
  bool reduced = false;
  while (true) {
    const TrajectorySample& last = traj.samples.back();
    if (s >= options.max_length) {
      traj.stop_reason = "max_length";
      break;
    }
    Params k1 = dir, k2, k3, k4, next_dir;
    bool ok = field(u + 0.5 * h * k1, k2) && field(u + 0.5 * h * k2, k3) && field(u + h * k3, k4);
    Params next;
    SmallMat gm;
    if (ok) {
      // Stages that straddle a critical point would cancel in the RK4 sum.
      gm = distance_field(body, p, u).metric;
      ok = k1.dot(gm * k2) > 0.0 && k1.dot(gm * k3) > 0.0 && k1.dot(gm * k4) > 0.0;
    }
    if (ok) {
      next = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ok = field(next, next_dir);
    }
    if (!ok && !usable(u + h * dir)) {
      // Chart edge ahead rather than a vanishing gradient.
      if (h <= 1e-6) {
        traj.stop_reason = "chart_boundary";
        break;
      }
    }
    bool accept = false;
    TrajectorySample cand;
    if (ok) {
      const bool same_side = dir.dot(gm * next_dir) > 0.0;
      cand = record(s + h, next, next_dir);
      const bool monotone = sign * (cand.t - last.t) > 0.0;
      accept = same_side && monotone;
    }
    if (!accept) {
      h *= 0.5;
      if (!reduced) {
        reduced = true;
        traj.uniform_samples = traj.samples.size();
      }
      if (h < options.min_step) {
        if (last.phi < 1e3 * options.phi_floor) {
          traj.stop_reason = "phi_floor";
          break;
        }
        fail(ErrorCode::kNumerical, "stiff trajectory");
      }
      continue;
    }
    u = next;
    dir = next_dir;
    s += h;
    traj.samples.push_back(cand);
    if (cand.phi < options.phi_floor) {
      traj.stop_reason = "phi_floor";
      break;
    }
  }
  if (!reduced) traj.uniform_samples = traj.samples.size();
  return traj;
}

LiouvilleResult liouville_residual(const Trajectory& traj, const BodySpec& body, const ModelPoint& p) {
  const auto& sm = traj.samples;
  if (sm.size() < 5 || traj.uniform_samples < 5) fail(ErrorCode::kInvalidInput, "trajectory too short");
  const Curvature& c = body.curvature();
  LiouvilleResult r;
  r.residuals.assign(sm.size(), std::numeric_limits<double>::quiet_NaN());
  // 1 - cos(phi) computed without cancellation.
  auto one_minus_cos = [](double phi) {
    const double s = std::sin(0.5 * phi);
    return 2.0 * s * s;
  };
  for (std::size_t i = 1; i + 1 < traj.uniform_samples; ++i) {
    const double h1 = sm[i].t - sm[i - 1].t, h2 = sm[i + 1].t - sm[i].t;
    const double f0 = one_minus_cos(sm[i - 1].phi), f1 = one_minus_cos(sm[i].phi), f2 = one_minus_cos(sm[i + 1].phi);
    // d(cos phi)/dt = -d(1 - cos phi)/dt, three-point formula on a nonuniform grid.
    const double dfdt = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
    const double dcos = -dfdt;
    const CurvatureSample cs = curvature_sample(body, sm[i].u);
    const double k = normal_curvature(cs, sm[i].direction);
    const double res = std::abs(k - ct(c, sm[i].t) * std::cos(sm[i].phi) - dcos);
    r.residuals[i] = res;
    ++r.evaluated;
    if (res > r.max_residual) {
      r.max_residual = res;
      r.argmax = i;
    }
  }
  (void)p;
  return r;
}

// ---- comparison -----------------------------------------------------------------

double comparison_radial_angle(const Curvature& c, double lambda, double d, double t) {
  const double R = characteristic_radius(c, lambda);
  if (!(d > 0.0 && d < R)) fail(ErrorCode::kDomain, "origin depth must lie in (0, R_lambda)");
  const double slack = 1e-12 * std::max(1.0, R);
  if (t < d - slack || t > 2.0 * R - d + slack) fail(ErrorCode::kDomain, "outside sphere chord range");
  t = std::clamp(t, d, 2.0 * R - d);
  return model_triangle_angle(c, t, R, R - d);
}

RacReport rac_check(const BodySpec& body, const Origin& origin, double lambda, double tol) {
  const Curvature& c = body.curvature();
  RacReport r;
  r.d = origin.d;
  r.R_lambda = characteristic_radius(c, lambda);
  r.tolerance = tol;
  r.max_violation = -std::numeric_limits<double>::infinity();
  const Grid& g = body.grid();
  const double lo = r.d, hi = 2.0 * r.R_lambda - r.d;
  for (std::size_t i = 0; i < g.params.size(); ++i) {
    const CurvatureSample s = curvature_sample(body, g.params[i]);
    const double t = distance(origin.p, s.point);
    if (t < lo || t > hi) {
      ++r.skipped;
      continue;
    }
    const double v = radial_angle(s, origin.p) - comparison_radial_angle(c, lambda, r.d, t);
    ++r.checked;
    if (v > r.max_violation) {
      r.max_violation = v;
      r.argmax = i;
    }
  }
  if (r.checked == 0) r.max_violation = 0.0;
  r.passed = r.max_violation <= tol;
  return r;
}

RacReport rac_check(const BodySpec& body, const ModelPoint& p, double lambda, double tol) {
  return rac_check(body, locate_origin(body, p), lambda, tol);
}

MonotonicityReport monotonicity_certificate(const Trajectory& traj, const Curvature& c, double lambda, double d,
                                            double tol) {
  const double R = characteristic_radius(c, lambda);
  std::vector<std::pair<double, double>> pts;  // (t, f sn_c(t))
  MonotonicityReport r;
  r.tolerance = tol;
  for (const auto& s : traj.samples) {
    if (s.t < d || s.t > 2.0 * R - d) continue;
    const double f = std::cos(s.phi) - std::cos(comparison_radial_angle(c, lambda, d, s.t));
    r.max_abs_f = std::max(r.max_abs_f, std::abs(f));
    pts.emplace_back(s.t, f * sn(c, s.t));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> thin;
  for (const auto& q : pts)
    if (thin.empty() || q.first - thin.back().first >= 1e-6) thin.push_back(q);
  r.points = thin.size();
  r.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < thin.size(); ++i) {
    const double slope = (thin[i].second - thin[i - 1].second) / (thin[i].first - thin[i - 1].first);
    r.min_slope = std::min(r.min_slope, slope);
  }
  if (thin.size() < 2) r.min_slope = 0.0;
  r.passed = r.min_slope >= -tol;
  return r;
}

}  // namespace rollkit
