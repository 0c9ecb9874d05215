#include "rollkit/convex_body.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rollkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Grid periodic_grid(int n) {
  Grid g;
  g.resolution = n;
  g.params.reserve(n);
  for (int i = 0; i < n; ++i) {
    Params u(1);
    u[0] = kTwoPi * i / n;
    g.params.push_back(u);
  }
  g.weights.assign(n, kTwoPi / n);
  return g;
}

// Gauss-Legendre in the polar angle, uniform in the azimuth.
Grid polar_grid(int n) {
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> nodes, node_weights;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (x == 0.0) {
      nodes.push_back(0.0);
      node_weights.push_back(w);
    } else {
      nodes.push_back(x);
      node_weights.push_back(w);
      nodes.push_back(-x);
      node_weights.push_back(w);
    }
  }
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });

  Grid g;
  g.resolution = n;
  for (std::size_t idx : order) {
    const double theta = 0.5 * kPi * (nodes[idx] + 1.0);
    const double wt = 0.5 * kPi * node_weights[idx];
    for (int j = 0; j < n; ++j) {
      Params u(2);
      u << theta, kTwoPi * j / n;
      g.params.push_back(u);
      g.weights.push_back(wt * kTwoPi / n);
    }
  }
  return g;
}

int default_resolution(int m) { return m == 2 ? 2048 : 64; }

// Unit direction in R^m parameterized by the chart, with derivatives.
struct DirectionJet {
  Eigen::VectorXd d;
  std::vector<Eigen::VectorXd> d1, d2;
};

DirectionJet unit_direction(int m, const Params& u) {
  DirectionJet j;
  if (m == 2) {
    const double c = std::cos(u[0]), s = std::sin(u[0]);
    j.d = Eigen::Vector2d(c, s);
    j.d1 = {Eigen::Vector2d(-s, c)};
    j.d2 = {Eigen::Vector2d(-c, -s)};
    return j;
  }
  if (m != 3) fail(ErrorCode::kInvalidInput, "sampled bodies support m = 2 or 3");
  const double ct = std::cos(u[0]), st = std::sin(u[0]);
  const double cp = std::cos(u[1]), sp = std::sin(u[1]);
  j.d = Eigen::Vector3d(st * cp, st * sp, ct);
  j.d1 = {Eigen::Vector3d(ct * cp, ct * sp, -st), Eigen::Vector3d(-st * sp, st * cp, 0.0)};
  j.d2 = {Eigen::Vector3d(-st * cp, -st * sp, -ct), Eigen::Vector3d(-ct * sp, ct * cp, 0.0),
          Eigen::Vector3d(-ct * sp, ct * cp, 0.0), Eigen::Vector3d(-st * cp, -st * sp, 0.0)};
  return j;
}

Vec combine(const std::vector<Vec>& frame, const Eigen::VectorXd& coeffs) {
  Vec v = Vec::Zero(frame.front().size());
  for (int k = 0; k < coeffs.size(); ++k) v += coeffs[k] * frame[k];
  return v;
}

BodySpec::Parts base_parts(const Curvature& c, int m, int resolution) {
  if (m != 2 && m != 3) fail(ErrorCode::kInvalidInput, "sampled bodies support m = 2 or 3");
  BodySpec::Parts p;
  p.curvature = c;
  p.dim = m;
  p.default_resolution = resolution > 0 ? resolution : default_resolution(m);
  if (m == 2) {
    p.grid_factory = periodic_grid;
    p.periodic = {true};
    p.lower = {0.0};
    p.upper = {kTwoPi};
  } else {
    p.grid_factory = polar_grid;
    p.periodic = {false, true};
    p.lower = {0.0, 0.0};
    p.upper = {kPi, kTwoPi};
  }
  p.witness = model_origin(c, m);
  return p;
}

}  // namespace

// ---- BodySpec ---------------------------------------------------------------

BodySpec::BodySpec(Parts parts) : parts_(std::make_shared<const Parts>(std::move(parts))) {
  if (!parts_->chart || !parts_->grid_factory) fail(ErrorCode::kInvalidInput, "body needs a chart and a grid");
  grid_ = parts_->grid_factory(parts_->default_resolution);
  if (grid_.params.empty()) fail(ErrorCode::kInvalidInput, "empty sampling grid");
}

BodySpec BodySpec::with_resolution(int resolution) const {
  Parts p = *parts_;
  p.default_resolution = resolution;
  return BodySpec(std::move(p));
}

BodySpec BodySpec::with_fd_step(double h) const {
  Parts p = *parts_;
  p.fd_step = h;
  p.analytic_jet = nullptr;
  return BodySpec(std::move(p));
}

ModelPoint BodySpec::point(const Params& u) const { return {parts_->chart(u), parts_->curvature}; }

Params BodySpec::wrap(const Params& u) const {
  Params w = u;
  for (int i = 0; i < w.size(); ++i) {
    if (!parts_->periodic[i]) continue;
    const double span = parts_->upper[i] - parts_->lower[i];
    w[i] = parts_->lower[i] + std::fmod(std::fmod(w[i] - parts_->lower[i], span) + span, span);
  }
  return w;
}

bool BodySpec::in_domain(const Params& u) const {
  for (int i = 0; i < u.size(); ++i) {
    if (parts_->periodic[i]) continue;
    if (u[i] <= parts_->lower[i] || u[i] >= parts_->upper[i]) return false;
  }
  return true;
}

ChartJet BodySpec::jet(const Params& u) const {
  if (parts_->analytic_jet) return parts_->analytic_jet(u);
  return finite_difference_jet(u, parts_->fd_step);
}

ChartJet BodySpec::finite_difference_jet(const Params& u, double h) const {
  const int n = chart_dim();
  const auto& f = parts_->chart;
  ChartJet j;
  j.point = f(u);
  j.d1.resize(n);
  j.d2.resize(n * n);
  std::vector<Vec> plus(n), minus(n);
  for (int i = 0; i < n; ++i) {
    Params up = u, um = u;
    up[i] += h;
    um[i] -= h;
    plus[i] = f(up);
    minus[i] = f(um);
    j.d1[i] = (plus[i] - minus[i]) / (2.0 * h);
    j.d2[i * n + i] = (plus[i] - 2.0 * j.point + minus[i]) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      Params a = u, b = u, cc = u, d = u;
      a[i] += h, a[k] += h;
      b[i] += h, b[k] -= h;
      cc[i] -= h, cc[k] += h;
      d[i] -= h, d[k] -= h;
      const Vec mixed = (f(a) - f(b) - f(cc) + f(d)) / (4.0 * h * h);
      j.d2[i * n + k] = mixed;
      j.d2[k * n + i] = mixed;
    }
  }
  return j;
}

// ---- curvature --------------------------------------------------------------

CurvatureSample curvature_sample(const BodySpec& body, const Params& u) {
  const Curvature& c = body.curvature();
  const int n = body.chart_dim();
  const ChartJet j = body.jet(u);

  CurvatureSample s;
  s.point = {j.point, c};
  s.tangents.reserve(n);
  for (const Vec& d : j.d1) s.tangents.push_back(project_to_tangent(s.point, d));

  s.first_form = SmallMat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s.first_form(a, b) = ambient_dot(c, s.tangents[a], s.tangents[b]);

  const double trace = s.first_form.trace();
  const double det = s.first_form.determinant();
  if (!(trace > 0.0) || !(det > 1e-14 * std::pow(trace, n))) {
    fail(ErrorCode::kNumerical, "immersion failure: degenerate chart derivative");
  }

  // Normal = kernel of the form against {position, tangents}.
  const int ambient = int(j.point.size());
  Eigen::MatrixXd constraints(n + (c.sign() != 0 ? 1 : 0), ambient);
  int row = 0;
  auto add_row = [&](const Vec& v) {
    Eigen::VectorXd w = v;
    if (c.sign() < 0) w[0] = -w[0];
    constraints.row(row++) = w.transpose();
  };
  if (c.sign() != 0) add_row(s.point.coords);
  for (const Vec& t : s.tangents) add_row(t);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
  Vec nu = svd.matrixV().col(ambient - 1);
  nu /= ambient_norm(c, nu);
  // Inward: positive pairing with the chord towards the interior witness.
  if (ambient_dot(c, nu, body.witness().coords - s.point.coords) < 0.0) nu = -nu;
  s.inward_normal = {s.point, nu};

  s.second_form = SmallMat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s.second_form(a, b) = ambient_dot(c, j.d2[a * n + b], nu);
  s.second_form = 0.5 * (s.second_form + s.second_form.transpose()).eval();

  if (n == 1) {
    s.shape_eigenvalues = {s.second_form(0, 0) / s.first_form(0, 0)};
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(s.second_form),
                                                                 Eigen::MatrixXd(s.first_form));
    for (int k = 0; k < n; ++k) s.shape_eigenvalues.push_back(es.eigenvalues()[k]);
  }
  s.kappa_min = *std::min_element(s.shape_eigenvalues.begin(), s.shape_eigenvalues.end());
  return s;
}

TangentVector unit_inward_normal(const BodySpec& body, const Params& u) {
  return curvature_sample(body, u).inward_normal;
}

SmallMat second_fundamental_form(const BodySpec& body, const Params& u) {
  return curvature_sample(body, u).second_form;
}

double normal_curvature(const CurvatureSample& sample, const Params& w) {
  const double g = w.dot(sample.first_form * w);
  if (!(g > 0.0)) fail(ErrorCode::kDomain, "normal curvature along a zero direction");
  return w.dot(sample.second_form * w) / g;
}

double normal_curvature(const BodySpec& body, const Params& u, const Params& w) {
  return normal_curvature(curvature_sample(body, u), w);
}

ConvexityCertificate certify_lambda_convex(const BodySpec& body, double lambda, double tol) {
  ConvexityCertificate cert;
  cert.lambda = lambda;
  cert.tolerance = tol;
  cert.min_kappa = std::numeric_limits<double>::infinity();
  const Grid& g = body.grid();
  for (std::size_t i = 0; i < g.params.size(); ++i) {
    const double k = curvature_sample(body, g.params[i]).kappa_min;
    if (k < cert.min_kappa) {
      cert.min_kappa = k;
      cert.argmin = i;
    }
  }
  cert.argmin_params = g.params[cert.argmin];
  cert.margin = cert.min_kappa - lambda;
  cert.passed = cert.min_kappa >= lambda - tol;
  return cert;
}

// ---- generators -------------------------------------------------------------

BodySpec make_geodesic_sphere(const Curvature& c, int m, double radius, const Vec& center_offset, int resolution) {
  if (!(radius > 0.0)) fail(ErrorCode::kDomain, "sphere radius must be positive");
  if (c.sign() > 0 && !(radius < 0.5 * model_diameter(c))) {
    fail(ErrorCode::kDomain, "sphere radius must be below pi/(2 sqrt(c)) for a convex sphere");
  }
  BodySpec::Parts p = base_parts(c, m, resolution);
  const ModelPoint origin = model_origin(c, m);
  std::vector<Vec> frame = tangent_frame(origin);
  ModelPoint center = origin;
  if (center_offset.size() > 0) {
    if (center_offset.size() != m) fail(ErrorCode::kInvalidInput, "center offset must have m components");
    center = exp_map({origin, combine(frame, Eigen::VectorXd(center_offset))});
    for (Vec& e : frame) e = parallel_transport(origin, center, e);
  }
  const double radial = c.sign() == 0 ? 0.0 : cs(c, radius);
  const double lateral = c.sign() == 0 ? radius : sn(c, radius);
  const Vec base = c.sign() == 0 ? center.coords : Vec(radial * center.coords);

  p.analytic_jet = [=](const Params& u) {
    const DirectionJet d = unit_direction(m, u);
    ChartJet j;
    j.point = base + lateral * combine(frame, d.d);
    for (const auto& v : d.d1) j.d1.push_back(lateral * combine(frame, v));
    for (const auto& v : d.d2) j.d2.push_back(lateral * combine(frame, v));
    return j;
  };
  p.chart = [=](const Params& u) { return Vec(base + lateral * combine(frame, unit_direction(m, u).d)); };
  p.witness = center;
  p.descriptor = {"geodesic_sphere", {{"c", c.value()}, {"dim", double(m)}, {"radius", radius}}};
  return BodySpec(std::move(p));
}

namespace {

// Body whose chart is u -> exp_origin(v(u)) for a tangent map v given in the
// origin frame together with its parameter derivatives.
BodySpec tangent_image_body(BodySpec::Parts p, std::function<DirectionJet(const Params&)> tangent) {
  const Curvature c = p.curvature;
  const ModelPoint origin = model_origin(c, p.dim);
  const std::vector<Vec> frame = tangent_frame(origin);
  const int n = p.dim - 1;
  p.chart = [=](const Params& u) { return exp_map({origin, combine(frame, tangent(u).d)}).coords; };
  // X = f(rho) o + g(rho) v with f = cs, g = sn(rho) / rho, rho = |v|.
  p.analytic_jet = [=](const Params& u) {
    const DirectionJet tj = tangent(u);
    const Vec v = combine(frame, tj.d);
    const double rho = tj.d.norm();
    if (!(rho > 0.0)) fail(ErrorCode::kNumerical, "immersion failure: chart passes through the origin");
    const double cv = c.value();
    const double s = sn(c, rho), co = cs(c, rho);
    const double f = c.sign() == 0 ? 1.0 : co, f1 = -cv * s, f2 = -cv * co;
    const double g = s / rho;
    const double g1 = co / rho - s / (rho * rho);
    const double g2 = -cv * s / rho - 2.0 * co / (rho * rho) + 2.0 * s / (rho * rho * rho);
    const Vec o = c.sign() == 0 ? Vec(Vec::Zero(v.size())) : origin.coords;

    std::vector<Vec> v1(n), v2(n * n);
    std::vector<double> r1(n), r2(n * n);
    for (int i = 0; i < n; ++i) {
      v1[i] = combine(frame, tj.d1[i]);
      r1[i] = tj.d.dot(tj.d1[i]) / rho;
    }
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        v2[i * n + k] = combine(frame, tj.d2[i * n + k]);
        r2[i * n + k] = (tj.d1[i].dot(tj.d1[k]) + tj.d.dot(tj.d2[i * n + k]) - r1[i] * r1[k]) / rho;
      }

    ChartJet j;
    j.point = f * o + g * v;
    for (int i = 0; i < n; ++i) j.d1.push_back(f1 * r1[i] * o + g1 * r1[i] * v + g * v1[i]);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const int ik = i * n + k;
        j.d2.push_back((f2 * r1[i] * r1[k] + f1 * r2[ik]) * o + (g2 * r1[i] * r1[k] + g1 * r2[ik]) * v +
                       g1 * (r1[i] * v1[k] + r1[k] * v1[i]) + g * v2[ik]);
      }
    return j;
  };
  return BodySpec(std::move(p));
}

}  // namespace

BodySpec make_ellipse_like(const Curvature& c, const std::vector<double>& axes, int resolution) {
  const int m = int(axes.size());
  for (double a : axes) {
    if (!(a > 0.0)) fail(ErrorCode::kDomain, "ellipse axes must be positive");
    if (c.sign() > 0 && !(a < 0.5 * model_diameter(c))) fail(ErrorCode::kDomain, "ellipse axis too long for c > 0");
  }
  BodySpec::Parts p = base_parts(c, m, resolution);
  Eigen::VectorXd scale(m);
  for (int k = 0; k < m; ++k) scale[k] = axes[k];
  p.descriptor = {"ellipse_like", {{"c", c.value()}, {"dim", double(m)}}};
  for (int k = 0; k < m; ++k) p.descriptor.params.emplace_back("axis" + std::to_string(k), axes[k]);
  return tangent_image_body(std::move(p), [=](const Params& u) {
    DirectionJet d = unit_direction(m, u);
    d.d = scale.cwiseProduct(d.d);
    for (auto& x : d.d1) x = scale.cwiseProduct(x);
    for (auto& x : d.d2) x = scale.cwiseProduct(x);
    return d;
  });
}

BodySpec make_revolution_body(const Curvature& c, int m, const RevolutionProfile& profile, int resolution) {
  if (!(profile.r0 > 0.0)) fail(ErrorCode::kDomain, "revolution profile needs r0 > 0");
  double amplitude = 0.0;
  for (const auto& [k, a] : profile.harmonics) {
    if (k < 1) fail(ErrorCode::kInvalidInput, "harmonic order must be >= 1");
    amplitude += std::abs(a);
  }
  if (amplitude >= profile.r0) fail(ErrorCode::kDomain, "revolution profile is not star-shaped (radius <= 0)");
  if (c.sign() > 0 && !(profile.r0 + amplitude < 0.5 * model_diameter(c))) {
    fail(ErrorCode::kDomain, "revolution body too large for c > 0");
  }
  BodySpec::Parts p = base_parts(c, m, resolution);
  p.descriptor = {"revolution", {{"c", c.value()}, {"dim", double(m)}, {"r0", profile.r0}}};
  for (const auto& [k, a] : profile.harmonics) p.descriptor.params.emplace_back("a" + std::to_string(k), a);
  const RevolutionProfile prof = profile;
  const int n = m - 1;
  return tangent_image_body(std::move(p), [=](const Params& u) {
    double r = prof.r0, r1 = 0.0, r2 = 0.0;
    for (const auto& [k, a] : prof.harmonics) {
      r += a * std::cos(k * u[0]);
      r1 -= a * k * std::sin(k * u[0]);
      r2 -= a * k * k * std::cos(k * u[0]);
    }
    const DirectionJet e = unit_direction(m, u);
    DirectionJet d;
    d.d = r * e.d;
    for (int i = 0; i < n; ++i) d.d1.push_back(r * e.d1[i] + (i == 0 ? r1 : 0.0) * e.d);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd x = r * e.d2[i * n + k];
        if (i == 0) x += r1 * e.d1[k];
        if (k == 0) x += r1 * e.d1[i];
        if (i == 0 && k == 0) x += r2 * e.d;
        d.d2.push_back(x);
      }
    return d;
  });
}

// ---- two-ball hull ------------------------------------------------------------

namespace {

struct HullPiece {
  bool arc = false;
  double length = 0.0;
  // segment: X(s) = cs(s) start + sn(s) dir
  Vec start, dir;
  // arc: X(theta) = cs(r) center + sn(r) (cos(theta) e1 + sin(theta) e2), theta = theta0 + s / sn(r)
  Vec center, e1, e2;
  double theta0 = 0.0;
};

struct HullGeometry {
  Curvature c;
  double radius = 0.0;
  std::vector<HullPiece> pieces;
  double total = 0.0;
};

Vec hull_point_jet(const HullGeometry& h, double s, Vec* d1, Vec* d2) {
  const Curvature& c = h.c;
  s = std::fmod(std::fmod(s, h.total) + h.total, h.total);
  std::size_t k = 0;
  while (k + 1 < h.pieces.size() && s >= h.pieces[k].length) {
    s -= h.pieces[k].length;
    ++k;
  }
  const HullPiece& pc = h.pieces[k];
  if (!pc.arc) {
    const Vec x = cs(c, s) * pc.start + sn(c, s) * pc.dir;
    if (d1) *d1 = -c.value() * sn(c, s) * pc.start + cs(c, s) * pc.dir;
    if (d2) *d2 = -c.value() * x;
    return x;
  }
  const double rho = sn(c, h.radius);
  const double th = pc.theta0 + s / rho;
  const Vec radial = std::cos(th) * pc.e1 + std::sin(th) * pc.e2;
  const Vec x = cs(c, h.radius) * pc.center + rho * radial;
  if (d1) *d1 = -std::sin(th) * pc.e1 + std::cos(th) * pc.e2;
  if (d2) *d2 = -radial / rho;
  return x;
}

HullPiece segment_piece(const Curvature& c, const Vec& from, const Vec& to) {
  const ModelPoint a{from, c}, b{to, c};
  const TangentVector v = log_map(a, b);
  HullPiece p;
  p.length = norm(v);
  p.start = from;
  p.dir = v.vec / p.length;
  return p;
}

// Arc around `center` from `from` to `to`, turning away from the model origin.
HullPiece arc_piece(const Curvature& c, double r, const Vec& center, const Vec& from, const Vec& to,
                    const Vec& origin) {
  const ModelPoint cp{center, c};
  const Vec u = log_map(cp, {from, c}).vec / r;
  const Vec w = log_map(cp, {to, c}).vec / r;
  Vec away = -log_map(cp, {origin, c}).vec;
  away -= ambient_dot(c, away, u) * u;
  const Vec v = away / ambient_norm(c, away);
  HullPiece p;
  p.arc = true;
  p.center = center;
  p.e1 = u;
  p.e2 = v;
  // Sweep measured from u through v until w.
  double sweep = std::atan2(ambient_dot(c, w, v), ambient_dot(c, w, u));
  if (sweep <= 0.0) sweep += kTwoPi;
  p.length = sn(c, r) * sweep;
  return p;
}

HullGeometry build_hull(const Curvature& c, double r, double separation) {
  HullGeometry h;
  h.c = c;
  h.radius = r;
  const double a = 0.5 * separation;
  const double k = c.scale();
  Vec center_p, center_m, foot_bp, foot_bm, foot_tp, foot_tm, origin;
  if (c.sign() == 0) {
    origin = Vec::Zero(2);
    center_p = Eigen::Vector2d(a, 0.0);
    center_m = Eigen::Vector2d(-a, 0.0);
    foot_bp = Eigen::Vector2d(a, -r);
    foot_bm = Eigen::Vector2d(-a, -r);
    foot_tp = Eigen::Vector2d(a, r);
    foot_tm = Eigen::Vector2d(-a, r);
  } else {
    // Unit hyperboloid; the flat sides lie on <x, n> = 0 with n spacelike.
    const double ka = k * a, kr = k * r;
    const Curvature unit(-1.0);
    const Eigen::Vector3d cp(std::cosh(ka), std::sinh(ka), 0.0), cm(std::cosh(ka), -std::sinh(ka), 0.0);
    const double n0 = -std::sinh(kr) / std::cosh(ka);
    const double n2 = std::sqrt(1.0 + n0 * n0);
    const Eigen::Vector3d n_bottom(n0, 0.0, n2), n_top(n0, 0.0, -n2);
    auto foot = [&](const Eigen::Vector3d& ctr, const Eigen::Vector3d& n) -> Vec {
      return (ctr - std::sinh(kr) * n) / std::cosh(kr) / k;
    };
    (void)unit;
    origin = Eigen::Vector3d(1.0 / k, 0.0, 0.0);
    center_p = cp / k;
    center_m = cm / k;
    foot_bp = foot(cp, n_bottom);
    foot_bm = foot(cm, n_bottom);
    foot_tp = foot(cp, n_top);
    foot_tm = foot(cm, n_top);
  }
  // Start at the midpoint of the bottom side so that u = 0 is the point closest to the origin.
  HullPiece bottom = segment_piece(c, foot_bm, foot_bp);
  const double half = 0.5 * bottom.length;
  const Vec mid = cs(c, half) * bottom.start + sn(c, half) * bottom.dir;
  h.pieces.push_back(segment_piece(c, mid, foot_bp));
  h.pieces.push_back(arc_piece(c, r, center_p, foot_bp, foot_tp, origin));
  h.pieces.push_back(segment_piece(c, foot_tp, foot_tm));
  h.pieces.push_back(arc_piece(c, r, center_m, foot_tm, foot_bm, origin));
  h.pieces.push_back(segment_piece(c, foot_bm, mid));
  for (const auto& pc : h.pieces) h.total += pc.length;
  return h;
}

// C^2 variant: one quarter is integrated from the Frenet equations with a
// piecewise-linear curvature ramp, then closed up by the two reflections.
struct SmoothHull {
  Curvature c;
  double quarter = 0.0;
  double ds = 0.0;
  double ramp_start = 0.0, ramp_end = 0.0, arc_curvature = 0.0;
  std::vector<Vec> xs, ts, ns;  // dense Frenet samples along the quarter

  double curvature_at(double s) const {
    if (s <= ramp_start) return 0.0;
    if (s >= ramp_end) return arc_curvature;
    return arc_curvature * (s - ramp_start) / (ramp_end - ramp_start);
  }

  // One RK4 step of X' = T, T' = -c X + k N, N' = -k T.
  void step(double s, double h, Vec& x, Vec& t, Vec& n) const {
    const double cv = c.value();
    auto rhs = [&](double ss, const Vec& X, const Vec& T, const Vec& N, Vec& dX, Vec& dT, Vec& dN) {
      const double k = curvature_at(ss);
      dX = T;
      dT = -cv * X + k * N;
      dN = -k * T;
    };
    Vec k1x, k1t, k1n, k2x, k2t, k2n, k3x, k3t, k3n, k4x, k4t, k4n;
    rhs(s, x, t, n, k1x, k1t, k1n);
    rhs(s + 0.5 * h, x + 0.5 * h * k1x, t + 0.5 * h * k1t, n + 0.5 * h * k1n, k2x, k2t, k2n);
    rhs(s + 0.5 * h, x + 0.5 * h * k2x, t + 0.5 * h * k2t, n + 0.5 * h * k2n, k3x, k3t, k3n);
    rhs(s + h, x + h * k3x, t + h * k3t, n + h * k3n, k4x, k4t, k4n);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    t += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
    n += h / 6.0 * (k1n + 2 * k2n + 2 * k3n + k4n);
  }

  void state_at(double s, Vec& x, Vec& t, Vec& n) const {
    s = std::clamp(s, 0.0, quarter);
    std::size_t i = std::min<std::size_t>(xs.size() - 1, std::size_t(s / ds));
    x = xs[i], t = ts[i], n = ns[i];
    double pos = i * ds;
    double rest = s - pos;
    while (rest > 0.0) {
      const double h = std::min(rest, 0.25 * ds);
      step(pos, h, x, t, n);
      pos += h;
      rest -= h;
    }
  }
};

// Index of the coordinate that crosses the symmetry axis (second spatial direction).
int transverse_axis(const Curvature& c) { return c.sign() == 0 ? 1 : 2; }
int axial_axis(const Curvature& c) { return c.sign() == 0 ? 0 : 1; }

SmoothHull build_smooth_hull(const HullGeometry& sharp, double smoothing) {
  const Curvature& c = sharp.c;
  SmoothHull sh;
  sh.c = c;
  sh.arc_curvature = ct(c, sharp.radius);
  const HullPiece& first = sharp.pieces.front();
  const Vec x0 = first.start, t0 = first.dir;
  // Inward normal at the start points from the bottom side towards the origin.
  Vec n0 = Vec::Zero(x0.size());
  n0[transverse_axis(c)] = 1.0;
  n0 = project_to_tangent({x0, c}, n0);
  n0 -= ambient_dot(c, n0, t0) * t0;
  n0 /= ambient_norm(c, n0);

  const int tr = transverse_axis(c), ax = axial_axis(c);
  const double h = 1e-4 * std::max(1.0, first.length);
  const double max_len = 4.0 * (first.length + sharp.pieces[1].length);

  // Integrates until the curve meets the axis (transverse coordinate 0); returns
  // the axial component of the tangent there, which vanishes for a closing quarter.
  auto shoot = [&](double flat, bool record) {
    sh.ramp_start = std::max(0.0, flat - 0.5 * smoothing);
    sh.ramp_end = flat + 0.5 * smoothing;
    Vec x = x0, t = t0, n = n0;
    double s = 0.0;
    if (record) {
      sh.xs = {x}, sh.ts = {t}, sh.ns = {n};
      sh.ds = h;
    }
    while (s < max_len) {
      Vec xn = x, tn = t, nn = n;
      sh.step(s, h, xn, tn, nn);
      if (xn[tr] >= 0.0 && x[tr] < 0.0) {
        // Locate the crossing by bisection on the step length.
        double lo = 0.0, hi = h;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          Vec xm = x, tm = t, nm = n;
          sh.step(s, mid, xm, tm, nm);
          (xm[tr] < 0.0 ? lo : hi) = mid;
        }
        Vec xm = x, tm = t, nm = n;
        sh.step(s, hi, xm, tm, nm);
        if (record) sh.quarter = s + hi;
        return tm[ax];
      }
      x = xn, t = tn, n = nn;
      s += h;
      if (record) sh.xs.push_back(x), sh.ts.push_back(t), sh.ns.push_back(n);
    }
    fail(ErrorCode::kNumerical, "smoothed hull quarter does not close");
  };

  // The tangent's axial component at the crossing decreases with the flat length.
  double lo = std::max(0.0, first.length - 2.0 * smoothing), hi = first.length + 2.0 * smoothing;
  double g_lo = shoot(lo, false), g_hi = shoot(hi, false);
  if (g_lo * g_hi > 0.0) fail(ErrorCode::kNumerical, "smoothed hull: cannot bracket closure");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = shoot(mid, false);
    if ((g > 0.0) == (g_lo > 0.0)) {
      lo = mid, g_lo = g;
    } else {
      hi = mid;
    }
  }
  shoot(0.5 * (lo + hi), true);
  return sh;
}

Vec reflect(const Curvature& c, Vec v, bool axial, bool transverse) {
  if (axial) v[axial_axis(c)] = -v[axial_axis(c)];
  if (transverse) v[transverse_axis(c)] = -v[transverse_axis(c)];
  return v;
}

Vec smooth_hull_jet(const SmoothHull& sh, double s, Vec* d1, Vec* d2) {
  const double q = sh.quarter;
  const double total = 4.0 * q;
  s = std::fmod(std::fmod(s, total) + total, total);
  const int quadrant = std::min(3, int(s / q));
  const double local = s - quadrant * q;
  // Quadrants: forward, reversed+mirror(transverse), forward+both, reversed+mirror(axial).
  const bool reversed = quadrant == 1 || quadrant == 3;
  const bool flip_ax = quadrant == 2 || quadrant == 3;
  const bool flip_tr = quadrant == 1 || quadrant == 2;
  Vec x, t, n;
  sh.state_at(reversed ? q - local : local, x, t, n);
  const double k = sh.curvature_at(reversed ? q - local : local);
  if (d1) *d1 = reflect(sh.c, reversed ? Vec(-t) : t, flip_ax, flip_tr);
  if (d2) *d2 = reflect(sh.c, Vec(-sh.c.value() * x + k * n), flip_ax, flip_tr);
  return reflect(sh.c, x, flip_ax, flip_tr);
}

}  // namespace

BodySpec make_two_ball_hull(const Curvature& c, double radius, double separation, double smoothing, int resolution) {
  if (c.sign() > 0) fail(ErrorCode::kDomain, "two-ball hull is defined for c <= 0");
  if (!(radius > 0.0)) fail(ErrorCode::kDomain, "ball radius must be positive");
  if (!(separation > 2.0 * radius)) fail(ErrorCode::kDomain, "balls are not disjoint (separation <= 2r)");
  if (smoothing < 0.0) fail(ErrorCode::kDomain, "smoothing must be non-negative");
  BodySpec::Parts p = base_parts(c, 2, resolution);
  const HullGeometry geo = build_hull(c, radius, separation);
  if (smoothing > 0.0 && smoothing > geo.pieces.front().length) {
    fail(ErrorCode::kDomain, "smoothing longer than the flat side");
  }
  p.descriptor = {"two_ball_hull",
                  {{"c", c.value()}, {"radius", radius}, {"separation", separation}, {"smoothing", smoothing}}};
  if (smoothing == 0.0) {
    const double scale = geo.total / kTwoPi;
    p.analytic_jet = [geo, scale](const Params& u) {
      ChartJet j;
      Vec d1, d2;
      j.point = hull_point_jet(geo, u[0] * scale, &d1, &d2);
      j.d1 = {scale * d1};
      j.d2 = {scale * scale * d2};
      return j;
    };
    p.chart = [geo, scale](const Params& u) { return hull_point_jet(geo, u[0] * scale, nullptr, nullptr); };
  } else {
    auto sh = std::make_shared<const SmoothHull>(build_smooth_hull(geo, smoothing));
    const double scale = 4.0 * sh->quarter / kTwoPi;
    p.analytic_jet = [sh, scale](const Params& u) {
      ChartJet j;
      Vec d1, d2;
      j.point = smooth_hull_jet(*sh, u[0] * scale, &d1, &d2);
      j.d1 = {scale * d1};
      j.d2 = {scale * scale * d2};
      return j;
    };
    p.chart = [sh, scale](const Params& u) { return smooth_hull_jet(*sh, u[0] * scale, nullptr, nullptr); };
  }
  return BodySpec(std::move(p));
}

Params two_ball_hull_closest_param(const BodySpec& hull) {
  if (hull.descriptor().generator != "two_ball_hull") fail(ErrorCode::kInvalidInput, "not a two-ball hull");
  return Params::Zero(1);
}

}  // namespace rollkit
