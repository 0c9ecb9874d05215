#include "rollkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "rollkit/convex_body.hpp"
#include "rollkit/harness.hpp"
#include "rollkit/riemannian2d.hpp"

namespace rollkit {

namespace {

using Pt = std::array<double, 2>;
using Polyline = std::vector<Pt>;

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return int(i);
    fail(ErrorCode::kInvalidInput, "CSV column '" + name + "' missing");
  }
};

std::optional<Csv> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) return csv;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) csv.columns.push_back(cell);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

Vec vec_of(const Json& a) {
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[Eigen::Index(i)] = a[i].get<double>();
  return v;
}

// Azimuthal equidistant picture of M(c), m = 2, centered at the model origin.
Pt flatten(const ModelPoint& q) {
  const ModelPoint o = model_origin(q.curvature, 2);
  const TangentVector v = log_map(o, q);
  const int shift = q.curvature.sign() == 0 ? 0 : 1;
  return {v.vec[shift], v.vec[shift + 1]};
}

Polyline model_circle(const ModelPoint& center, double r, int samples) {
  const auto frame = tangent_frame(center);
  Polyline out;
  for (int i = 0; i <= samples; ++i) {
    const double th = 2.0 * M_PI * i / samples;
    out.push_back(flatten(exp_map({center, std::cos(th) * frame[0] + std::sin(th) * frame[1]}, r)));
  }
  return out;
}

Polyline body_outline(const BodySpec& body) {
  Polyline out;
  for (const auto& u : body.grid().params) out.push_back(flatten(body.point(u)));
  if (!out.empty()) out.push_back(out.front());
  return out;
}

struct Layer {
  std::string stroke;
  double width;
  std::vector<Polyline> lines;
};

struct Marker {
  Pt at;
  std::string fill;
  double radius;
};

std::string render(const std::string& title, const std::vector<Layer>& layers, const std::vector<Marker>& markers) {
  double lo0 = std::numeric_limits<double>::infinity(), lo1 = lo0, hi0 = -lo0, hi1 = -lo0;
  auto grow = [&](const Pt& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return;
    lo0 = std::min(lo0, p[0]), hi0 = std::max(hi0, p[0]);
    lo1 = std::min(lo1, p[1]), hi1 = std::max(hi1, p[1]);
  };
  for (const auto& l : layers)
    for (const auto& pl : l.lines)
      for (const auto& p : pl) grow(p);
  for (const auto& m : markers) grow(m.at);
  if (!(hi0 > lo0)) hi0 = lo0 + 1.0;
  if (!(hi1 > lo1)) hi1 = lo1 + 1.0;
  const double size = 640.0, pad = 24.0;
  const double scale = (size - 2.0 * pad) / std::max(hi0 - lo0, hi1 - lo1);
  auto X = [&](const Pt& p) { return pad + (p[0] - lo0) * scale; };
  auto Y = [&](const Pt& p) { return size - pad - (p[1] - lo1) * scale; };

  std::ostringstream ss;
  ss.precision(6);
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 24 << "\">\n";
  ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  ss << "<text x=\"" << pad << "\" y=\"" << size + 14 << "\" font-family=\"monospace\" font-size=\"12\">" << title
     << "</text>\n";
  for (const auto& l : layers) {
    for (const auto& pl : l.lines) {
      ss << "<polyline fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << l.width << "\" points=\"";
      for (const auto& p : pl)
        if (std::isfinite(p[0]) && std::isfinite(p[1])) ss << X(p) << "," << Y(p) << " ";
      ss << "\"/>\n";
    }
  }
  for (const auto& m : markers) {
    ss << "<circle cx=\"" << X(m.at) << "\" cy=\"" << Y(m.at) << "\" r=\"" << m.radius << "\" fill=\"" << m.fill
       << "\"/>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

std::vector<Polyline> polylines_from(const Csv& csv, const std::string& group, const std::vector<std::string>& xs,
                                     const Curvature* c) {
  std::map<long, Polyline> lines;
  const int g = csv.col(group);
  std::vector<int> cols;
  for (const auto& x : xs) cols.push_back(csv.col(x));
  for (const auto& row : csv.rows) {
    Pt p;
    if (c) {
      Vec v(cols.size());
      for (std::size_t i = 0; i < cols.size(); ++i) v[Eigen::Index(i)] = row[cols[i]];
      p = flatten({v, *c});
    } else {
      p = {row[cols[0]], row[cols[1]]};
    }
    lines[long(row[g])].push_back(p);
  }
  std::vector<Polyline> out;
  for (auto& [k, pl] : lines) out.push_back(std::move(pl));
  return out;
}

std::vector<std::string> xcols(int ambient) {
  std::vector<std::string> out;
  for (int i = 0; i < ambient; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

BodySpec rebuild_body(const Scenario& s) {
  const Curvature c(s.curvature);
  const BodyConfig& b = *s.body;
  if (b.generator == "geodesic_sphere") {
    Vec offset = Vec::Zero(b.dim);
    for (int i = 0; i < b.dim; ++i) offset[i] = b.center_offset[i];
    return make_geodesic_sphere(c, b.dim, b.radius, offset, b.resolution);
  }
  if (b.generator == "ellipse") return make_ellipse_like(c, b.axes, b.resolution);
  if (b.generator == "revolution") return make_revolution_body(c, b.dim, {b.r0, b.harmonics}, b.resolution);
  return make_two_ball_hull(c, b.radius, b.separation, b.smoothing, b.resolution);
}

}  // namespace

void write_plot(const std::filesystem::path& run_record, const std::filesystem::path& svg_out) {
  std::filesystem::path record = run_record;
  if (std::filesystem::is_directory(record)) record /= "run.json";
  std::ifstream in(record);
  if (!in) fail(ErrorCode::kIo, "cannot read run record '" + record.string() + "'");
  Json run;
  try {
    run = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kInvalidInput, std::string("malformed run record: ") + e.what());
  }
  if (!run.contains("scenario") || !run.contains("report")) {
    fail(ErrorCode::kInvalidInput, "run record lacks scenario or report");
  }
  const Scenario s = parse_scenario(run["scenario"]);
  const Json& report = run["report"];
  const Json& summary = report["summary"];
  const std::filesystem::path dir = record.parent_path();
  const Curvature c(s.curvature);
  const double R = report["R_lambda"].is_number() ? report["R_lambda"].get<double>() : 0.0;

  std::vector<Layer> layers;
  std::vector<Marker> markers;
  std::string title = s.id + "  [" + s.module + "]  " + report["verdict"].get<std::string>();

  if (s.module == "riemannian2d") {
    const auto curve = read_csv(dir / "curve.csv");
    if (!curve) fail(ErrorCode::kIo, "curve.csv missing next to the run record");
    Polyline outline;
    for (const auto& row : curve->rows) outline.push_back({row[curve->col("u0")], row[curve->col("u1")]});
    if (!outline.empty()) outline.push_back(outline.front());
    layers.push_back({"black", 1.5, {outline}});
    if (summary.contains("ball_center") && R > 0.0) {
      const MetricConfig& mc = s.riemannian2d.metric;
      ChartMetric metric = mc.name == "euclidean"          ? euclidean_chart()
                           : mc.name == "round_sphere"     ? round_sphere_chart(mc.c)
                           : mc.name == "hyperbolic"       ? hyperbolic_chart(mc.c)
                           : mc.name == "perturbed_sphere" ? perturbed_sphere_chart(mc.eps)
                                                           : revolution_chart({mc.profile, mc.sine_terms});
      const Vec2 center(summary["ball_center"][0].get<double>(), summary["ball_center"][1].get<double>());
      Polyline ball;
      for (const auto& p : metric_circle(metric, center, R, 180, 1e-2)) ball.push_back({p[0], p[1]});
      ball.push_back(ball.front());
      layers.push_back({"#1f5fbf", 1.0, {ball}});
      markers.push_back({{center[0], center[1]}, "#1f5fbf", 3.0});
    }
    if (const auto g = read_csv(dir / "geodesics.csv")) {
      layers.push_back({"#8a2be2", 1.0, polylines_from(*g, "path", {"u0", "u1"}, nullptr)});
    }
    title += "  (chart coordinates)";
  } else {
    if (s.module == "counterexample") {
      const double Rh = R;
      const BodySpec hull = make_two_ball_hull(c, Rh, s.counterexample.separation_rel * Rh, s.counterexample.smoothing,
                                               s.counterexample.resolution);
      layers.push_back({"black", 1.5, {body_outline(hull)}});
      if (const auto m = read_csv(dir / "margins.csv")) {
        const int depth = m->col("depth");
        const int ambient = c.sign() == 0 ? 2 : 3;
        std::vector<int> cols;
        for (const auto& x : xcols(ambient)) cols.push_back(m->col(x));
        for (const auto& row : m->rows) {
          if (row[depth] <= 0.0) continue;
          Vec v(ambient);
          for (int i = 0; i < ambient; ++i) v[i] = row[cols[i]];
          markers.push_back({flatten({v, c}), "#d62728", 1.5});
        }
      }
    } else {
      if (s.body->dim != 2) fail(ErrorCode::kInvalidInput, "plots are available for two-dimensional scenarios only");
      const BodySpec body = rebuild_body(s);
      layers.push_back({"black", 1.5, {body_outline(body)}});
      if (s.module == "rolling") {
        if (const auto m = read_csv(dir / "margins.csv")) {
          const double band = summary.value("contact_band", 0.0);
          const int gi = m->col("grid_index"), mg = m->col("margin");
          for (const auto& row : m->rows) {
            if (std::abs(row[mg]) <= band) {
              markers.push_back({flatten(body.point(body.grid().params[std::size_t(row[gi])])), "#d62728", 2.0});
            }
          }
        }
      }
      if (s.module == "rac" || s.module == "liouville") {
        if (const auto t = read_csv(dir / "trajectories.csv")) {
          const int ambient = c.sign() == 0 ? 2 : 3;
          layers.push_back({"#ff7f0e", 1.0, polylines_from(*t, "trajectory", xcols(ambient), &c)});
        }
        if (summary.contains("p")) markers.push_back({flatten({vec_of(summary["p"]), c}), "#2ca02c", 3.0});
      }
      if (s.module == "horoball") {
        if (const auto h = read_csv(dir / "horocycles.csv")) {
          layers.push_back({"#2ca02c", 1.0, polylines_from(*h, "seed_index", xcols(3), &c)});
        }
      }
    }
    if (summary.contains("ball_center") && R > 0.0) {
      const ModelPoint center{vec_of(summary["ball_center"]), c};
      layers.push_back({"#1f5fbf", 1.0, {model_circle(center, R, 360)}});
      markers.push_back({flatten(center), "#1f5fbf", 3.0});
    }
    title += c.sign() == 0 ? "" : "  (azimuthal equidistant)";
  }

  std::ofstream out(svg_out, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + svg_out.string() + "'");
  out << render(title, layers, markers);
}

}  // namespace rollkit
