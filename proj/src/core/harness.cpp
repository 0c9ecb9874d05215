#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "rollkit/harness.hpp"
#include "rollkit/horoball.hpp"
#include "rollkit/radial_angle.hpp"
#include "rollkit/riemannian2d.hpp"
#include "rollkit/rolling.hpp"

namespace rollkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- helpers ------------------------------------------------------------------------------

Json coords_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json params_json(const Params& u) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < u.size(); ++i) a.push_back(u[i]);
  return a;
}

std::vector<std::string> indexed(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void append(std::vector<double>& row, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
}

void append(std::vector<double>& row, const Params& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
}

// Deterministic stream seeded from the scenario id.
class IdRng {
 public:
  explicit IdRng(const std::string& id) : gen_(std::stoull(sha256_hex(id).substr(0, 16), nullptr, 16)) {}
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

ModelPoint point_from_tangent(const Curvature& c, const std::vector<double>& coords) {
  const int m = int(coords.size());
  const ModelPoint o = model_origin(c, m);
  Vec v = Vec::Zero(o.coords.size());
  const int shift = c.sign() == 0 ? 0 : 1;
  for (int i = 0; i < m; ++i) v[i + shift] = coords[i];
  return exp_map({o, v});
}

BodySpec build_body(const BodyConfig& b, const Curvature& c) {
  if (b.generator == "geodesic_sphere") {
    Vec offset = Vec::Zero(b.dim);
    for (int i = 0; i < b.dim; ++i) offset[i] = b.center_offset[i];
    return make_geodesic_sphere(c, b.dim, b.radius, offset, b.resolution);
  }
  if (b.generator == "ellipse") return make_ellipse_like(c, b.axes, b.resolution);
  if (b.generator == "revolution") return make_revolution_body(c, b.dim, {b.r0, b.harmonics}, b.resolution);
  return make_two_ball_hull(c, b.radius, b.separation, b.smoothing, b.resolution);
}

ChartMetric build_metric(const MetricConfig& m) {
  if (m.name == "euclidean") return euclidean_chart();
  if (m.name == "round_sphere") return round_sphere_chart(m.c);
  if (m.name == "hyperbolic") return hyperbolic_chart(m.c);
  if (m.name == "perturbed_sphere") return perturbed_sphere_chart(m.eps);
  return revolution_chart({m.profile, m.sine_terms});
}

// Resolves lambda (explicit or certified minimum) and records the certification check.
ConvexityCertificate certify(const Scenario& s, const BodySpec& body, RunOutcome& out) {
  const double lambda_in = s.lambda ? *s.lambda : 0.0;
  ConvexityCertificate cert = certify_lambda_convex(body, lambda_in, s.tol.certification);
  if (!s.lambda) {
    cert = certify_lambda_convex(body, cert.min_kappa, s.tol.certification);
    if (!satisfies_sphere_constraints(body.curvature(), cert.lambda)) {
      fail(ErrorCode::kDomain, "certified lambda violates the sphere constraints (c < 0 needs lambda > sqrt(-c))");
    }
  }
  out.lambda = cert.lambda;
  // lambda = sqrt(-c) is admissible for horoballs; the rolling radius is then infinite.
  out.R_lambda = satisfies_sphere_constraints(body.curvature(), cert.lambda)
                     ? characteristic_radius(body.curvature(), cert.lambda)
                     : kInf;
  CheckResult ch = check_at_least("certification", cert.min_kappa, cert.lambda - cert.tolerance, "certification");
  ch.detail["grid_points"] = body.grid().params.size();
  ch.detail["argmin"] = cert.argmin;
  ch.detail["argmin_params"] = params_json(cert.argmin_params);
  ch.detail["lambda_source"] = s.lambda ? "scenario" : "certified_minimum";
  out.checks.push_back(ch);
  return cert;
}

// Starting parameters for gradient trajectories: a point next to the foot of p,
// then points spread over the grid away from critical points.
std::vector<Params> trajectory_starts(const BodySpec& body, const ModelPoint& p, const Origin& o, int count) {
  std::vector<Params> starts;
  Params u = o.foot;
  u[0] += 0.05;
  if (!body.in_domain(u)) u[0] -= 0.1;
  starts.push_back(body.wrap(u));
  if (count > 1) {
    // Critical points of the distance (phi = 0) have no gradient direction.
    for (const auto& seed : spread_seeds(body, std::size_t(count - 1)))
      if (radial_angle(body, p, seed) > 1e-3) starts.push_back(seed);
  }
  return starts;
}

CsvTable trajectory_table(const std::vector<Trajectory>& trajs, int ambient) {
  CsvTable t{"trajectories.csv", concat({"trajectory", "sample", "s", "t", "phi"}, indexed("x", ambient)), {}};
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    for (std::size_t i = 0; i < trajs[k].samples.size(); ++i) {
      const auto& smp = trajs[k].samples[i];
      std::vector<double> row = {double(k), double(i), smp.s, smp.t, smp.phi};
      append(row, smp.coords);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

// ---- modules ------------------------------------------------------------------------------

void run_rolling(const Scenario& s, RunOutcome& out) {
  const Curvature c(s.curvature);
  const BodySpec body = build_body(*s.body, c);
  const ConvexityCertificate cert = certify(s, body, out);
  const double lambda = out.lambda, R = out.R_lambda;
  const int m = body.dim();
  out.summary["grid_points"] = body.grid().params.size();

  const std::vector<Params> seeds = spread_seeds(body, std::size_t(s.seed_count));
  RollingOptions opt;
  opt.tol = s.tol.inclusion;
  std::vector<RollingResult> results;
  try {
    results = verify_ball_rolling(body, lambda, cert, seeds, opt);
  } catch (const Error& e) {
    out.checks.push_back(check_error("inclusion", e.what()));
  }

  if (!results.empty()) {
    std::size_t worst = 0;
    double key_excess = -kInf, off_seed = kInf, max_abs = 0.0;
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (results[k].min_margin < results[worst].min_margin) worst = k;
      key_excess = std::max(key_excess, results[k].key_inequality_excess);
      off_seed = std::min(off_seed, results[k].off_seed_normalized_margin);
      for (double mg : results[k].margins) max_abs = std::max(max_abs, std::abs(mg));
    }
    const RollingResult& w = results[worst];
    CheckResult inc = check_at_least("inclusion", w.min_margin, -s.tol.inclusion, "inclusion");
    inc.detail["seeds"] = results.size();
    inc.detail["worst_seed"] = worst;
    inc.detail["argmin"] = w.argmin;
    inc.detail["off_seed_normalized_margin"] = off_seed;
    out.checks.push_back(inc);
    if (s.rolling.key_inequality) {
      CheckResult k = check_at_most("key_inequality", key_excess, s.tol.inclusion, "inclusion");
      k.detail["samples_per_seed"] = opt.key_samples;
      k.detail["epsilon_rel"] = opt.key_epsilon_rel;
      out.checks.push_back(k);
    }

    const RigidityProbe probe = rigidity_probe(body, results[0]);
    Json rig;
    rig["seed"] = 0;
    rig["alternative"] = to_string(probe.alternative);
    rig["contacts"] = probe.contacts;
    rig["separation_value"] = probe.separation_value;
    rig["max_angular_gap"] = probe.max_angular_gap;
    out.summary["rigidity"] = rig;
    if (!s.rolling.expect_rigidity.empty()) {
      CheckResult r = check_equals("rigidity", to_string(probe.alternative), s.rolling.expect_rigidity);
      r.detail["contacts"] = probe.contacts;
      out.checks.push_back(r);
    }
    if (s.rolling.expect_equality) {
      CheckResult e = check_at_most("equality_inclusion", max_abs, s.tol.agreement, "agreement");
      e.detail["statistic"] = "max |margin| over all seeds and grid points";
      out.checks.push_back(e);
    }

    out.summary["worst_seed"] = worst;
    out.summary["min_margin"] = w.min_margin;
    out.summary["seed_params"] = params_json(w.seed);
    out.summary["seed_point"] = coords_json(body.point(w.seed).coords);
    out.summary["ball_center"] = coords_json(w.center.coords);
    out.summary["contact_band"] = opt.contact_tol_rel * R;
    out.summary["contacts"] = w.contact_set.size();

    CsvTable seeds_csv{"seeds.csv",
                       concat(concat({"seed_index"}, indexed("u", m - 1)),
                              {"min_margin", "argmin", "contacts", "key_inequality_excess", "off_seed_normalized_margin",
                               "passed"}),
                       {}};
    for (const auto& r : results) {
      std::vector<double> row = {double(r.seed_index)};
      append(row, r.seed);
      row.insert(row.end(), {r.min_margin, double(r.argmin), double(r.contact_set.size()), r.key_inequality_excess,
                             r.off_seed_normalized_margin, r.passed ? 1.0 : 0.0});
      seeds_csv.rows.push_back(std::move(row));
    }
    out.sidecars.push_back(std::move(seeds_csv));
    CsvTable margins{"margins.csv", concat(concat({"seed_index", "grid_index"}, indexed("u", m - 1)), {"margin"}), {}};
    const Grid& g = body.grid();
    for (std::size_t i = 0; i < w.margins.size(); ++i) {
      std::vector<double> row = {double(w.seed_index), double(i)};
      append(row, g.params[i]);
      row.push_back(w.margins[i]);
      margins.rows.push_back(std::move(row));
    }
    out.sidecars.push_back(std::move(margins));
  }

  if (s.rolling.diameter) {
    const DiameterCheck d = verify_diameter(body, lambda, s.tol.inclusion, s.rolling.diameter_resolution);
    CheckResult dc = check_at_most("diameter", d.diameter, d.bound + s.tol.inclusion, "inclusion");
    dc.detail["margin"] = d.margin;
    dc.detail["pair"] = {d.i, d.j};
    dc.detail["resolution"] = d.resolution;
    out.checks.push_back(dc);
    if (c.sign() > 0) {
      out.checks.push_back(check_at_most("diameter_model", d.diameter, d.model_bound + s.tol.inclusion, "inclusion"));
    }
    if (s.rolling.expect_equality) {
      out.checks.push_back(check_at_most("equality_diameter", std::abs(d.margin), s.tol.agreement, "agreement"));
    }
    out.summary["diameter"] = d.diameter;
  }
  if (s.rolling.volume) {
    try {
      const VolumeCheck v = verify_volume(body, lambda, s.tol.inclusion, s.tol.quadrature);
      CheckResult vc = check_at_least("volume", v.volume_margin_rel, -s.tol.inclusion, "inclusion");
      vc.detail["volume"] = v.volume;
      vc.detail["ball_volume"] = v.ball_volume;
      vc.detail["quadrature_error"] = v.volume_error;
      out.checks.push_back(vc);
      CheckResult bc = check_at_least("boundary_measure", v.boundary_margin_rel, -s.tol.inclusion, "inclusion");
      bc.detail["boundary_measure"] = v.boundary_measure;
      bc.detail["sphere_area"] = v.sphere_area;
      bc.detail["quadrature_error"] = v.boundary_error;
      out.checks.push_back(bc);
      if (s.rolling.expect_equality) {
        out.checks.push_back(
            check_at_most("equality_volume", std::abs(v.volume_margin_rel), s.tol.agreement, "agreement"));
        out.checks.push_back(
            check_at_most("equality_boundary_measure", std::abs(v.boundary_margin_rel), s.tol.agreement, "agreement"));
      }
      out.summary["volume"] = v.volume;
      out.summary["boundary_measure"] = v.boundary_measure;
    } catch (const Error& e) {
      out.checks.push_back(check_error("volume", e.what()));
    }
  }
}

void run_radial(const Scenario& s, RunOutcome& out, bool liouville) {
  const Curvature c(s.curvature);
  const BodySpec body = build_body(*s.body, c);
  const ModelPoint p = point_from_tangent(c, s.radial.point);
  const Origin origin = locate_origin(body, p);
  out.summary["p"] = coords_json(p.coords);
  out.summary["d"] = origin.d;
  out.summary["foot_params"] = params_json(origin.foot);
  out.summary["foot_index"] = origin.foot_index;
  out.summary["foot_ties"] = origin.ties;
  const auto starts = trajectory_starts(body, p, origin, s.radial.trajectories);
  const int ambient = int(p.coords.size());

  auto integrate_all = [&](double step) {
    TrajectoryOptions opt;
    opt.step = step;
    std::vector<Trajectory> out_trajs;
    for (const auto& u0 : starts) {
      out_trajs.push_back(integrate_trajectory(body, p, u0, TrajectoryDirection::kIncreasing, opt));
    }
    return out_trajs;
  };

  if (liouville) {
    if (s.lambda) out.lambda = *s.lambda, out.R_lambda = characteristic_radius(c, *s.lambda);
    double res[2] = {0.0, 0.0};
    std::size_t evaluated[2] = {0, 0};
    std::vector<Trajectory> first;
    Json stops = Json::array();
    for (int k = 0; k < 2; ++k) {
      const auto trajs = integrate_all(s.radial.step / (k ? 2.0 : 1.0));
      for (const auto& t : trajs) {
        const LiouvilleResult lr = liouville_residual(t, body, p);
        res[k] = std::max(res[k], lr.max_residual);
        evaluated[k] += lr.evaluated;
        if (k == 0) stops.push_back(t.stop_reason);
      }
      if (k == 0) first = trajs;
    }
    CheckResult r = check_at_most("liouville_residual", res[0], s.tol.residual, "residual");
    r.detail["step"] = s.radial.step;
    r.detail["evaluated"] = evaluated[0];
    r.detail["stop_reasons"] = stops;
    out.checks.push_back(r);
    CheckResult conv = check_at_least("convergence_ratio", res[0] / res[1], s.radial.min_convergence_ratio, "");
    conv.detail["residual_step"] = res[0];
    conv.detail["residual_half_step"] = res[1];
    conv.detail["evaluated_half_step"] = evaluated[1];
    out.checks.push_back(conv);
    out.summary["residual_step"] = res[0];
    out.summary["residual_half_step"] = res[1];
    out.sidecars.push_back(trajectory_table(first, ambient));
    return;
  }

  const ConvexityCertificate cert = certify(s, body, out);
  (void)cert;
  const double lambda = out.lambda;
  const RacReport rr = rac_check(body, origin, lambda, s.tol.inclusion);
  CheckResult rc = check_at_most("rac", rr.max_violation, s.tol.inclusion, "inclusion");
  rc.detail["argmax"] = rr.argmax;
  rc.detail["checked"] = rr.checked;
  rc.detail["skipped"] = rr.skipped;
  out.checks.push_back(rc);

  const auto trajs = integrate_all(s.radial.step);
  double min_slope = kInf, max_f = 0.0;
  std::size_t points = 0;
  for (const auto& t : trajs) {
    const MonotonicityReport mc = monotonicity_certificate(t, c, lambda, origin.d, s.tol.inclusion);
    min_slope = std::min(min_slope, mc.min_slope);
    max_f = std::max(max_f, mc.max_abs_f);
    points += mc.points;
  }
  CheckResult mono = check_at_least("monotonicity", min_slope, -s.tol.inclusion, "inclusion");
  mono.detail["trajectories"] = trajs.size();
  mono.detail["points"] = points;
  out.checks.push_back(mono);
  if (s.radial.expect_equality) out.checks.push_back(check_at_most("equality", max_f, s.tol.equality, "equality"));
  if (s.radial.control_lambda) {
    const RacReport ctl = rac_check(body, origin, *s.radial.control_lambda, s.tol.inclusion);
    CheckResult cc = check_at_least("control_violation", ctl.max_violation, s.tol.detection, "detection", true);
    cc.detail["control_lambda"] = *s.radial.control_lambda;
    out.checks.push_back(cc);
  }
  out.summary["max_violation"] = rr.max_violation;
  out.summary["min_slope"] = min_slope;
  out.summary["max_abs_f"] = max_f;
  out.sidecars.push_back(trajectory_table(trajs, ambient));
}

void run_horoball(const Scenario& s, RunOutcome& out) {
  const Curvature c(s.curvature);
  const BodySpec body = build_body(*s.body, c);
  const ConvexityCertificate cert = certify(s, body, out);
  const double lambda = out.lambda;
  if (!(lambda >= c.scale())) fail(ErrorCode::kDomain, "horoball constraints violated (lambda < sqrt(-c))");
  const auto seeds = spread_seeds(body, std::size_t(s.seed_count));
  const int m = body.dim();

  HoroballReport rep;
  try {
    rep = verify_horoball_rolling(body, lambda, cert, seeds, s.tol.inclusion, s.horoball.reversed);
  } catch (const Error& e) {
    out.checks.push_back(check_error("horoball_inclusion", e.what()));
    return;
  }
  CheckResult inc = check_at_least("horoball_inclusion", rep.min_b, -s.tol.inclusion, "inclusion");
  inc.detail["seeds"] = rep.seeds.size();
  inc.detail["reversed"] = rep.reversed;
  out.checks.push_back(inc);
  out.checks.push_back(check_at_most("seed_level", rep.max_b_at_seed, s.tol.seed_level, "seed_level", true));

  if (s.horoball.reversed_control) {
    const HoroballReport ctl = verify_horoball_rolling(body, lambda, cert, seeds, s.tol.inclusion, true);
    out.checks.push_back(check_at_most("reversed_ray_control", ctl.min_b, -s.tol.detection, "detection", true));
  }

  if (s.horoball.busemann_samples > 0) {
    IdRng rng(s.id);
    double worst = 0.0;
    const double reach = 2.0 / c.scale();
    for (int k = 0; k < s.horoball.busemann_samples; ++k) {
      const CurvatureSample cs = curvature_sample(body, seeds[std::size_t(k) % seeds.size()]);
      const BusemannRay ray = make_busemann_ray(cs.inward_normal);
      std::vector<double> v(m);
      for (auto& x : v) x = rng.uniform(-reach, reach);
      const ModelPoint q = point_from_tangent(c, v);
      const double closed = busemann_closed_form(ray, q);
      const BusemannLimit lim = busemann_by_limit(ray, q, s.horoball.busemann_t_max);
      worst = std::max(worst, std::abs(closed - lim.value));
    }
    CheckResult ag = check_at_most("busemann_agreement", worst, s.tol.agreement, "agreement");
    ag.detail["samples"] = s.horoball.busemann_samples;
    ag.detail["t_max"] = s.horoball.busemann_t_max;
    out.checks.push_back(ag);
  }

  CsvTable seeds_csv{"seeds.csv",
                     concat(concat({"seed_index"}, indexed("u", m - 1)), {"min_b", "argmin", "b_at_seed", "passed"}),
                     {}};
  for (const auto& r : rep.seeds) {
    std::vector<double> row = {double(r.seed_index)};
    append(row, r.seed);
    row.insert(row.end(), {r.min_b, double(r.argmin), r.b_at_seed, r.passed ? 1.0 : 0.0});
    seeds_csv.rows.push_back(std::move(row));
  }
  out.sidecars.push_back(std::move(seeds_csv));

  if (m == 2 && s.horoball.horocycles > 0) {
    CsvTable hc{"horocycles.csv", concat({"seed_index", "sample"}, indexed("x", 3)), {}};
    const int count = std::min<int>(s.horoball.horocycles, int(seeds.size()));
    for (int k = 0; k < count; ++k) {
      const CurvatureSample cs = curvature_sample(body, seeds[k]);
      const Vec dir = s.horoball.reversed ? Vec(-cs.inward_normal.vec) : cs.inward_normal.vec;
      const BusemannRay ray = make_busemann_ray({cs.point, dir});
      const ChartJet j = body.jet(seeds[k]);
      const auto pts = horocycle(ray, j.d1[0], 0.0, 4.0 / c.scale(), 201);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<double> row = {double(k), double(i)};
        append(row, pts[i].coords);
        hc.rows.push_back(std::move(row));
      }
    }
    out.sidecars.push_back(std::move(hc));
  }
  out.summary["min_b"] = rep.min_b;
  out.summary["max_abs_b_at_seed"] = rep.max_b_at_seed;
}

void run_counterexample(const Scenario& s, RunOutcome& out) {
  const Curvature c(s.curvature);
  const auto& k = s.counterexample;
  out.lambda = *s.lambda;
  out.R_lambda = characteristic_radius(c, out.lambda);
  const double R = out.R_lambda, separation = k.separation_rel * R;
  const BodySpec hull = make_two_ball_hull(c, R, separation, k.smoothing, k.resolution);
  const CounterexampleReport rep = tangent_ball_penetration(hull, R, s.tol.detection);
  CheckResult ch = k.expect_penetration
                       ? check_at_least("penetration", rep.penetration, s.tol.detection, "detection", true)
                       : check_at_most("penetration", rep.penetration, s.tol.null_control, "null_control", true);
  ch.detail["expect_penetration"] = k.expect_penetration;
  ch.detail["deepest"] = rep.deepest;
  out.checks.push_back(ch);
  out.summary["separation"] = separation;
  out.summary["penetration"] = rep.penetration;
  out.summary["tangent_point"] = coords_json(rep.tangent_point.coords);
  out.summary["ball_center"] = coords_json(rep.ball_center.coords);
  out.summary["grid_points"] = hull.grid().params.size();

  CsvTable t{"margins.csv", concat({"grid_index", "u0"}, concat(indexed("x", int(rep.ball_center.coords.size())),
                                                              {"distance_to_center", "depth"})),
             {}};
  const Grid& g = hull.grid();
  for (std::size_t i = 0; i < g.params.size(); ++i) {
    const ModelPoint q = hull.point(g.params[i]);
    const double d = distance(rep.ball_center, q);
    std::vector<double> row = {double(i), g.params[i][0]};
    append(row, q.coords);
    row.insert(row.end(), {d, R - d});
    t.rows.push_back(std::move(row));
  }
  out.sidecars.push_back(std::move(t));
}

void run_riemannian2d(const Scenario& s, RunOutcome& out) {
  const auto& k = s.riemannian2d;
  const ChartMetric metric = build_metric(k.metric);
  const double c = s.curvature;
  const Vec2 center(k.oval_center[0], k.oval_center[1]);
  const ChartCurve curve = chart_oval(center, k.oval_axes[0], k.oval_axes[1]);
  out.summary["metric"] = metric.name();
  out.summary["diameter_cap"] = std::isfinite(metric.diameter_cap()) ? Json(metric.diameter_cap()) : Json(nullptr);

  if (k.curvature_box) {
    const auto& b = *k.curvature_box;
    const CurvatureBound cb = sample_curvature(metric, Vec2(b[0], b[1]), Vec2(b[2], b[3]), k.curvature_samples);
    CheckResult hyp = check_at_least("curvature_hypothesis", cb.min_k, c - s.tol.certification, "certification");
    hyp.detail["argmin"] = {cb.argmin[0], cb.argmin[1]};
    hyp.detail["samples_per_axis"] = cb.samples_per_axis;
    out.checks.push_back(hyp);
    if (k.curvature_bounds) {
      out.checks.push_back(
          check_at_least("curvature_lower", cb.min_k, (*k.curvature_bounds)[0] - s.tol.certification, "certification"));
      out.checks.push_back(
          check_at_most("curvature_upper", cb.max_k, (*k.curvature_bounds)[1] + s.tol.certification, "certification"));
    }
    out.summary["curvature_min"] = cb.min_k;
    out.summary["curvature_max"] = cb.max_k;
  }

  Rolling2dOptions opt;
  opt.curve_samples = k.curve_samples;
  opt.curvature_samples = k.curvature_samples;
  opt.region_padding = k.region_padding;
  std::vector<std::size_t> seeds;
  for (int i = 0; i < s.seed_count; ++i) seeds.push_back(std::size_t(i) * std::size_t(k.curve_samples) / std::size_t(s.seed_count));
  try {
    const Rolling2dReport rep = verify_ball_rolling_2d(metric, c, curve, s.lambda ? *s.lambda : 0.0, seeds,
                                                       s.tol.inclusion, opt);
    out.lambda = rep.lambda;
    out.R_lambda = rep.R_lambda;
    CheckResult rc = check_at_least("rolling_2d", rep.min_margin, -s.tol.inclusion, "inclusion");
    rc.detail["seeds"] = rep.seeds.size();
    rc.detail["min_geodesic_curvature"] = rep.min_geodesic_curvature;
    rc.detail["region_curvature_min"] = rep.curvature.min_k;
    out.checks.push_back(rc);
    std::size_t worst = 0;
    for (std::size_t i = 0; i < rep.seeds.size(); ++i)
      if (rep.seeds[i].margin < rep.seeds[worst].margin) worst = i;
    if (!rep.seeds.empty()) {
      out.summary["worst_seed"] = worst;
      out.summary["ball_center"] = {rep.seeds[worst].center[0], rep.seeds[worst].center[1]};
    }
    CsvTable sc{"seeds.csv", {"seed_index", "theta", "center_u0", "center_u1", "max_distance", "argmax", "margin", "passed"}, {}};
    for (const auto& sd : rep.seeds) {
      sc.rows.push_back({double(sd.seed_index), curve.period * double(sd.seed_index) / k.curve_samples, sd.center[0],
                         sd.center[1], sd.max_distance, double(sd.argmax), sd.margin, sd.passed ? 1.0 : 0.0});
    }
    out.sidecars.push_back(std::move(sc));
    if (!rep.seeds.empty()) {
      // Geodesic from the worst ball center to its farthest curve point.
      const auto& sd = rep.seeds[worst];
      const Vec2 target = curve.x(curve.period * double(sd.argmax) / k.curve_samples);
      const ChartGeodesic gq = shoot_geodesic(metric, sd.center, target, opt.shooting);
      const auto path = integrate_geodesic(metric, {sd.center, gq.initial_velocity, 0.0}, gq.length, 1e-2);
      CsvTable gt{"geodesics.csv", {"path", "s", "u0", "u1"}, {}};
      for (const auto& st : path) gt.rows.push_back({0.0, st.s, st.u[0], st.u[1]});
      out.sidecars.push_back(std::move(gt));
    }
  } catch (const Error& e) {
    out.checks.push_back(check_error("rolling_2d", e.what()));
  }

  CsvTable ct{"curve.csv", {"sample", "theta", "u0", "u1", "geodesic_curvature"}, {}};
  for (int i = 0; i < k.curve_samples; ++i) {
    const double th = curve.period * i / k.curve_samples;
    const Vec2 x = curve.x(th);
    ct.rows.push_back({double(i), th, x[0], x[1], geodesic_curvature(metric, curve, th)});
  }
  out.sidecars.push_back(std::move(ct));

  if (k.toponogov_count > 0) {
    IdRng rng(s.id);
    double lo0 = center[0] - k.oval_axes[0], hi0 = center[0] + k.oval_axes[0];
    double lo1 = center[1] - k.oval_axes[1], hi1 = center[1] + k.oval_axes[1];
    CsvTable tt{"triangles.csv",
                {"triangle", "x_u0", "x_u1", "y_u0", "y_u1", "z_u0", "z_u1", "side_xy", "side_xz", "side_yz", "angle_x",
                 "model_side", "margin"},
                {}};
    double worst = kInf;
    std::string error;
    for (int t = 0; t < k.toponogov_count && error.empty(); ++t) {
      const Vec2 base(rng.uniform(lo0, hi0), rng.uniform(lo1, hi1));
      auto vertex = [&] {
        return Vec2(base[0] + k.toponogov_size * rng.uniform(-0.5, 0.5),
                    base[1] + k.toponogov_size * rng.uniform(-0.5, 0.5));
      };
      const Vec2 x = vertex(), y = vertex(), z = vertex();
      try {
        const ToponogovReport tr = toponogov_check(metric, c, x, y, z, s.tol.inclusion, opt.shooting, 64);
        worst = std::min(worst, tr.margin);
        tt.rows.push_back({double(t), x[0], x[1], y[0], y[1], z[0], z[1], tr.side_xy, tr.side_xz, tr.side_yz,
                           tr.angle_x, tr.model_side, tr.margin});
      } catch (const Error& e) {
        error = e.what();
      }
    }
    if (!error.empty()) {
      out.checks.push_back(check_error("toponogov", error));
    } else {
      CheckResult tc = check_at_least("toponogov", worst, -s.tol.inclusion, "inclusion");
      tc.detail["triangles"] = k.toponogov_count;
      tc.detail["size"] = k.toponogov_size;
      out.checks.push_back(tc);
    }
    out.sidecars.push_back(std::move(tt));
  }
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde) t = std::time_t(std::strtoll(sde, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunOutcome run_scenario(const Scenario& s) {
  RunOutcome out;
  out.scenario = s;
  out.input_hash = sha256_hex(s.normalized().dump());
  out.timestamp = utc_timestamp();
  out.lambda = s.lambda ? *s.lambda : std::numeric_limits<double>::quiet_NaN();
  out.R_lambda = std::numeric_limits<double>::quiet_NaN();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (s.module == "rolling") run_rolling(s, out);
    else if (s.module == "rac") run_radial(s, out, false);
    else if (s.module == "liouville") run_radial(s, out, true);
    else if (s.module == "horoball") run_horoball(s, out);
    else if (s.module == "counterexample") run_counterexample(s, out);
    else run_riemannian2d(s, out);
  } catch (const Error& e) {
    out.checks.push_back(check_error("run", e.what()));
  }
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SuiteResult run_suite(const std::filesystem::path& dir, const std::filesystem::path& out_dir, int workers,
                      const std::vector<std::pair<std::string, double>>& overrides) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::kIo, "not a directory: '" + dir.string() + "'");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<SuiteRow> rows(files.size());
  std::vector<std::optional<Scenario>> scenarios(files.size());
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < files.size(); ++i) {
    rows[i].file = files[i].filename().string();
    rows[i].id = files[i].stem().string();
    try {
      Scenario s = load_scenario(files[i]);
      for (const auto& [key, value] : overrides) apply_tolerance_override(s, key, value);
      rows[i].id = s.id;
      if (seen.count(s.id)) fail(ErrorCode::kInvalidInput, "/id: duplicate scenario id '" + s.id + "'");
      seen[s.id] = i;
      scenarios[i] = std::move(s);
    } catch (const Error& e) {
      rows[i].verdict = "ERROR";
      rows[i].worst_margin = std::numeric_limits<double>::quiet_NaN();
      rows[i].failing = e.what();
    }
  }

  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      if (!scenarios[i]) continue;
      try {
        const RunOutcome run = run_scenario(*scenarios[i]);
        write_run(run, out_dir);
        rows[i].verdict = run.passed() ? "PASS" : "FAIL";
        rows[i].worst_margin = run.worst_margin();
        rows[i].runtime_seconds = run.runtime_seconds;
        std::string failing;
        for (const auto& name : run.failing_checks()) failing += (failing.empty() ? "" : ";") + name;
        rows[i].failing = failing;
      } catch (const std::exception& e) {
        rows[i].verdict = "ERROR";
        rows[i].worst_margin = std::numeric_limits<double>::quiet_NaN();
        rows[i].failing = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, int(files.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteResult result;
  result.rows = std::move(rows);
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SuiteRow& a, const SuiteRow& b) { return a.id < b.id; });
  std::ofstream(out_dir / "summary.csv", std::ios::binary | std::ios::trunc) << result.csv();
  std::ofstream(out_dir / "summary.txt", std::ios::binary | std::ios::trunc) << result.table();
  return result;
}

}  // namespace rollkit
