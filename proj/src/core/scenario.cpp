#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "rollkit/harness.hpp"
#include "rollkit/model_space.hpp"

namespace rollkit {

namespace {

const std::vector<std::string> kModules = {"rolling", "rac", "liouville", "horoball", "riemannian2d", "counterexample"};
const std::vector<std::string> kGenerators = {"geodesic_sphere", "ellipse", "revolution", "two_ball_hull"};
const std::vector<std::string> kMetrics = {"euclidean", "round_sphere", "hyperbolic", "perturbed_sphere", "revolution"};

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  fail(ErrorCode::kInvalidInput, (path.empty() ? std::string("/") : path) + ": " + what);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

// Typed access to one JSON object; remembers which keys were read so that
// unknown keys can be rejected.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) invalid(at(key), "required field missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) invalid(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(at(key), "expected a finite number");
    return x;
  }
  double number(const std::string& key, double def) { return touch(key) ? number(key) : def; }
  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) invalid(at(key), "expected a positive number");
    return x;
  }

  int integer(const std::string& key, int def, int lo, int hi) {
    if (!touch(key)) return def;
    const Json& v = raw(key);
    if (!v.is_number_integer()) invalid(at(key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) invalid(at(key), "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return int(x);
  }

  bool boolean(const std::string& key, bool def) {
    if (!touch(key)) return def;
    const Json& v = raw(key);
    if (!v.is_boolean()) invalid(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) invalid(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) { return touch(key) ? string(key) : def; }
  std::string choice(const std::string& key, const std::vector<std::string>& options) {
    const std::string s = string(key);
    for (const auto& o : options)
      if (o == s) return s;
    invalid(at(key), "unknown value '" + s + "' (expected one of: " + join(options) + ")");
  }

  std::vector<double> numbers(const std::string& key, std::size_t size = 0) {
    const Json& v = raw(key);
    if (!v.is_array()) invalid(at(key), "expected an array of numbers");
    if (size && v.size() != size) invalid(at(key), "expected " + std::to_string(size) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        invalid(at(key) + "/" + std::to_string(i), "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  // [[k, a_k], ...]
  std::vector<std::pair<int, double>> terms(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) invalid(at(key), "expected an array of [k, a] pairs");
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = at(key) + "/" + std::to_string(i);
      if (!v[i].is_array() || v[i].size() != 2 || !v[i][0].is_number_integer() || !v[i][1].is_number()) {
        invalid(p, "expected [integer k, number a]");
      }
      const int k = v[i][0].get<int>();
      if (k < 1 || k > 64) invalid(p + "/0", "expected an integer in [1, 64]");
      out.emplace_back(k, v[i][1].get<double>());
    }
    return out;
  }

  Reader object(const std::string& key) { return Reader(raw(key), at(key)); }
  std::optional<Reader> optional_object(const std::string& key) {
    if (!touch(key)) return std::nullopt;
    return object(key);
  }

  // null counts as absent, so a normalized document parses back.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key()) && !it->is_null()) invalid(at(it.key()), "unknown field");
    }
  }

 private:
  bool touch(const std::string& key) {
    used_.insert(key);
    return has(key);
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

BodyConfig parse_body(Reader r, const Curvature& c) {
  BodyConfig b;
  b.generator = r.choice("generator", kGenerators);
  b.dim = r.integer("dim", 2, 2, 3);
  b.resolution = r.integer("resolution", 0, 0, 1 << 16);
  if (b.resolution != 0 && b.resolution < 8) invalid(r.at("resolution"), "expected 0 (default) or >= 8");
  Reader p = r.object("params");
  const double kappa = c.scale();
  if (b.generator == "geodesic_sphere") {
    b.radius = p.positive("radius", 1.0);
    b.center_offset = p.has("center_offset") ? p.numbers("center_offset", b.dim) : std::vector<double>(b.dim, 0.0);
    if (c.sign() > 0 && !(b.radius < 0.5 * M_PI / kappa)) {
      invalid(p.at("radius"), "sphere body must fit in an open hemisphere (radius < pi / (2 sqrt(c)))");
    }
  } else if (b.generator == "ellipse") {
    b.axes = p.numbers("axes", b.dim);
    for (std::size_t i = 0; i < b.axes.size(); ++i)
      if (!(b.axes[i] > 0.0)) invalid(p.at("axes") + "/" + std::to_string(i), "expected a positive semi-axis");
  } else if (b.generator == "revolution") {
    b.r0 = p.positive("r0", 0.5);
    b.harmonics = p.has("harmonics") ? p.terms("harmonics") : std::vector<std::pair<int, double>>{};
  } else {
    if (b.dim != 2) invalid(r.at("dim"), "two_ball_hull is planar (dim 2)");
    if (c.sign() > 0) invalid("/curvature", "two_ball_hull needs c <= 0");
    b.radius = p.positive("radius", 1.0);
    b.separation = p.positive("separation", 3.0);
    b.smoothing = p.number("smoothing", 0.0);
    if (!(b.separation > 2.0 * b.radius)) invalid(p.at("separation"), "balls not disjoint (separation <= 2 radius)");
    if (b.smoothing < 0.0) invalid(p.at("smoothing"), "expected a non-negative number");
  }
  p.finish();
  r.finish();
  return b;
}

MetricConfig parse_metric(Reader r) {
  MetricConfig m;
  m.name = r.choice("name", kMetrics);
  static const Json kEmpty = Json::object();
  Reader p = r.has("params") ? r.object("params") : Reader(kEmpty, r.at("params"));
  if (m.name == "round_sphere") {
    m.c = p.positive("c", 1.0);
  } else if (m.name == "hyperbolic") {
    m.c = p.number("c", -1.0);
    if (!(m.c < 0.0)) invalid(p.at("c"), "hyperbolic chart needs c < 0");
  } else if (m.name == "perturbed_sphere") {
    m.eps = p.number("eps", 0.004);
    if (!(std::abs(m.eps) < 1.0 / 12.0)) invalid(p.at("eps"), "expected |eps| < 1/12");
  } else if (m.name == "revolution") {
    static const std::vector<std::string> kProfiles = {"sine_series", "sinh"};
    m.profile = p.has("profile") ? p.choice("profile", kProfiles) : "sine_series";
    if (m.profile == "sine_series") m.sine_terms = p.terms("sine_terms");
  }
  p.finish();
  r.finish();
  return m;
}

}  // namespace

const std::vector<std::string>& Tolerances::keys() {
  static const std::vector<std::string> k = {"inclusion", "residual",  "agreement", "quadrature",
                                             "certification", "equality", "detection", "null_control",
                                             "seed_level"};
  return k;
}

double* Tolerances::find(const std::string& key) {
  if (key == "inclusion") return &inclusion;
  if (key == "residual") return &residual;
  if (key == "agreement") return &agreement;
  if (key == "quadrature") return &quadrature;
  if (key == "certification") return &certification;
  if (key == "equality") return &equality;
  if (key == "detection") return &detection;
  if (key == "null_control") return &null_control;
  if (key == "seed_level") return &seed_level;
  return nullptr;
}

Scenario parse_scenario(const Json& doc) {
  Reader r(doc, "");
  Scenario s;
  s.id = r.string("id");
  static const std::regex kId("[A-Za-z0-9][A-Za-z0-9_.-]{0,127}");
  if (!std::regex_match(s.id, kId)) invalid("/id", "expected 1-128 characters from [A-Za-z0-9_.-]");
  s.module = r.choice("module", kModules);
  s.description = r.string("description", "");
  s.curvature = r.number("curvature");
  const Curvature c(s.curvature);
  if (r.has("lambda") && r.raw("lambda").is_string()) {
    if (r.string("lambda") != "auto") invalid("/lambda", "expected a number or \"auto\"");
  } else if (r.has("lambda")) {
    s.lambda = r.number("lambda");
  } else {
    r.raw("lambda");
  }

  const bool needs_body = s.module == "rolling" || s.module == "rac" || s.module == "liouville" || s.module == "horoball";
  if (needs_body) {
    s.body = parse_body(r.object("body"), c);
  } else if (r.has("body")) {
    invalid("/body", "module '" + s.module + "' takes no body");
  }

  if (auto seeds = r.optional_object("seeds")) {
    s.seed_count = seeds->integer("count", 32, 1, 4096);
    seeds->finish();
  }
  if (auto tol = r.optional_object("tolerances")) {
    for (const auto& key : Tolerances::keys()) *s.tol.find(key) = tol->positive(key, *s.tol.find(key));
    tol->finish();
  }

  // Sphere and horoball constraints before dispatch.
  if (s.lambda) {
    if (!(*s.lambda > 0.0)) invalid("/lambda", "expected lambda > 0");
    if (s.module == "horoball" && !(*s.lambda >= c.scale())) {
      invalid("/lambda", "horoball constraints violated (lambda < sqrt(-c))");
    }
    if (s.module != "horoball" && !satisfies_sphere_constraints(c, *s.lambda)) {
      invalid("/lambda", "sphere constraints violated (c < 0 needs lambda > sqrt(-c))");
    }
  }
  if (s.module == "horoball" && c.sign() >= 0) invalid("/curvature", "horoball module needs c < 0");
  if (s.module == "counterexample" && c.sign() > 0) invalid("/curvature", "counterexample needs c <= 0");
  if (s.module == "counterexample" && !s.lambda) invalid("/lambda", "counterexample needs an explicit lambda");

  Json empty = Json::object();
  const bool has_options = r.has("options");
  Reader o = has_options ? r.object("options") : Reader(empty, "/options");
  const int dim = s.body ? s.body->dim : 2;
  if (s.module == "rolling") {
    auto& k = s.rolling;
    k.expect_rigidity = o.has("expect_rigidity") ? o.choice("expect_rigidity", {"i", "ii", "none"}) : "";
    k.expect_equality = o.boolean("expect_equality", false);
    k.key_inequality = o.boolean("key_inequality", true);
    k.diameter = o.boolean("diameter", true);
    k.volume = o.boolean("volume", true);
    k.diameter_resolution = o.integer("diameter_resolution", 0, 0, 4096);
  } else if (s.module == "rac" || s.module == "liouville") {
    auto& k = s.radial;
    k.point = o.has("point") ? o.numbers("point", dim) : std::vector<double>(dim, 0.0);
    k.trajectories = o.integer("trajectories", s.module == "rac" ? 4 : 1, 1, 256);
    k.step = o.positive("step", 1e-3);
    if (s.module == "rac") {
      k.expect_equality = o.boolean("expect_equality", false);
      if (o.has("control_lambda")) k.control_lambda = o.positive("control_lambda", 1.0);
    } else {
      k.min_convergence_ratio = o.positive("min_convergence_ratio", 1.8);
    }
  } else if (s.module == "horoball") {
    auto& k = s.horoball;
    k.reversed = o.boolean("reversed", false);
    k.reversed_control = o.boolean("reversed_control", false);
    k.busemann_samples = o.integer("busemann_samples", 100, 0, 100000);
    k.busemann_t_max = o.positive("busemann_t_max", 30.0);
    k.horocycles = o.integer("horocycles", 0, 0, 64);
  } else if (s.module == "counterexample") {
    auto& k = s.counterexample;
    k.separation_rel = o.positive("separation_rel", 3.0);
    if (!(k.separation_rel > 2.0)) invalid(o.at("separation_rel"), "balls not disjoint (separation_rel <= 2)");
    k.smoothing = o.number("smoothing", 0.0);
    if (k.smoothing < 0.0) invalid(o.at("smoothing"), "expected a non-negative number");
    k.resolution = o.integer("resolution", 0, 0, 1 << 16);
    k.expect_penetration = o.boolean("expect_penetration", c.sign() < 0);
  } else if (s.module == "riemannian2d") {
    auto& k = s.riemannian2d;
    k.metric = parse_metric(o.object("metric"));
    Reader curve = o.object("curve");
    if (curve.choice("type", {"oval"}) != "oval") invalid(curve.at("type"), "unsupported curve");
    const auto cen = curve.numbers("center", 2), ax = curve.numbers("axes", 2);
    k.oval_center = {cen[0], cen[1]};
    k.oval_axes = {ax[0], ax[1]};
    if (!(ax[0] > 0.0 && ax[1] > 0.0)) invalid(curve.at("axes"), "expected positive semi-axes");
    curve.finish();
    k.curve_samples = o.integer("curve_samples", 256, 8, 1 << 16);
    k.curvature_samples = o.integer("curvature_samples", 256, 2, 4096);
    k.region_padding = o.number("region_padding", 0.05);
    if (o.has("curvature_box")) {
      const auto b = o.numbers("curvature_box", 4);
      if (!(b[0] < b[2] && b[1] < b[3])) invalid(o.at("curvature_box"), "expected [u0_lo, u1_lo, u0_hi, u1_hi]");
      k.curvature_box = std::array<double, 4>{b[0], b[1], b[2], b[3]};
    }
    if (o.has("curvature_bounds")) {
      const auto b = o.numbers("curvature_bounds", 2);
      if (!(b[0] <= b[1])) invalid(o.at("curvature_bounds"), "expected [K_lo, K_hi] with K_lo <= K_hi");
      k.curvature_bounds = std::array<double, 2>{b[0], b[1]};
    }
    k.toponogov_count = o.integer("toponogov_count", 50, 0, 10000);
    k.toponogov_size = o.positive("toponogov_size", 0.3);
  }
  o.finish();
  r.finish();
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kInvalidInput, std::string("/: malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

void apply_tolerance_override(Scenario& s, const std::string& key, double value) {
  double* slot = s.tol.find(key);
  if (!slot) fail(ErrorCode::kInvalidInput, "/tolerances/" + key + ": unknown tolerance (expected one of: " + join(Tolerances::keys()) + ")");
  if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorCode::kInvalidInput, "/tolerances/" + key + ": expected a positive number");
  *slot = value;
}

Json Scenario::normalized() const {
  Json j;
  j["id"] = id;
  j["module"] = module;
  j["description"] = description;
  j["curvature"] = curvature;
  if (lambda) j["lambda"] = *lambda;
  else j["lambda"] = "auto";
  if (body) {
    Json b;
    b["generator"] = body->generator;
    b["dim"] = body->dim;
    b["resolution"] = body->resolution;
    Json p = Json::object();
    if (body->generator == "geodesic_sphere") {
      p["radius"] = body->radius;
      p["center_offset"] = body->center_offset;
    } else if (body->generator == "ellipse") {
      p["axes"] = body->axes;
    } else if (body->generator == "revolution") {
      p["r0"] = body->r0;
      Json h = Json::array();
      for (const auto& [k, a] : body->harmonics) h.push_back({k, a});
      p["harmonics"] = h;
    } else {
      p["radius"] = body->radius;
      p["separation"] = body->separation;
      p["smoothing"] = body->smoothing;
    }
    b["params"] = p;
    j["body"] = b;
  }
  j["seeds"] = {{"count", seed_count}};
  Json t;
  Tolerances copy = tol;
  for (const auto& key : Tolerances::keys()) t[key] = *copy.find(key);
  j["tolerances"] = t;
  Json o = Json::object();
  if (module == "rolling") {
    o["expect_rigidity"] = rolling.expect_rigidity.empty() ? Json(nullptr) : Json(rolling.expect_rigidity);
    o["expect_equality"] = rolling.expect_equality;
    o["key_inequality"] = rolling.key_inequality;
    o["diameter"] = rolling.diameter;
    o["volume"] = rolling.volume;
    o["diameter_resolution"] = rolling.diameter_resolution;
  } else if (module == "rac" || module == "liouville") {
    o["point"] = radial.point;
    o["trajectories"] = radial.trajectories;
    o["step"] = radial.step;
    if (module == "rac") {
      o["expect_equality"] = radial.expect_equality;
      o["control_lambda"] = radial.control_lambda ? Json(*radial.control_lambda) : Json(nullptr);
    } else {
      o["min_convergence_ratio"] = radial.min_convergence_ratio;
    }
  } else if (module == "horoball") {
    o["reversed"] = horoball.reversed;
    o["reversed_control"] = horoball.reversed_control;
    o["busemann_samples"] = horoball.busemann_samples;
    o["busemann_t_max"] = horoball.busemann_t_max;
    o["horocycles"] = horoball.horocycles;
  } else if (module == "counterexample") {
    o["separation_rel"] = counterexample.separation_rel;
    o["smoothing"] = counterexample.smoothing;
    o["resolution"] = counterexample.resolution;
    o["expect_penetration"] = counterexample.expect_penetration;
  } else if (module == "riemannian2d") {
    const auto& k = riemannian2d;
    Json m;
    m["name"] = k.metric.name;
    Json p = Json::object();
    if (k.metric.name == "round_sphere" || k.metric.name == "hyperbolic") p["c"] = k.metric.c;
    if (k.metric.name == "perturbed_sphere") p["eps"] = k.metric.eps;
    if (k.metric.name == "revolution") {
      p["profile"] = k.metric.profile;
      Json terms = Json::array();
      for (const auto& [n, a] : k.metric.sine_terms) terms.push_back({n, a});
      if (k.metric.profile == "sine_series") p["sine_terms"] = terms;
    }
    m["params"] = p;
    o["metric"] = m;
    o["curve"] = {{"type", "oval"}, {"center", k.oval_center}, {"axes", k.oval_axes}};
    o["curve_samples"] = k.curve_samples;
    o["curvature_samples"] = k.curvature_samples;
    o["region_padding"] = k.region_padding;
    o["curvature_box"] = k.curvature_box ? Json(*k.curvature_box) : Json(nullptr);
    o["curvature_bounds"] = k.curvature_bounds ? Json(*k.curvature_bounds) : Json(nullptr);
    o["toponogov_count"] = k.toponogov_count;
    o["toponogov_size"] = k.toponogov_size;
  }
  j["options"] = o;
  return j;
}

}  // namespace rollkit
