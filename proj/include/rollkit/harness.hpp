#pragma once

// Scenario documents, verification reports, run records and suites.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rollkit {

using Json = nlohmann::ordered_json;

std::string version_string();

// ---- scenarios --------------------------------------------------------------------------

struct Tolerances {
  double inclusion = 1e-6;      // rolling margins, horoball b, Toponogov, diameter, RAC, monotonicity
  double residual = 1e-4;       // Liouville residual
  double agreement = 1e-6;      // closed form vs limit, equality-case margins
  double quadrature = 1e-8;     // relative halved-grid quadrature error
  double certification = 1e-8;  // lambda-convexity and curvature-bound certification
  double equality = 1e-7;       // |f| on equality spheres
  double detection = 1e-3;      // size a negative control must reach
  double null_control = 1e-9;   // size a null control must stay below
  double seed_level = 1e-8;     // |b| at the seed of a Busemann ray

  static const std::vector<std::string>& keys();
  double* find(const std::string& key);
};

struct BodyConfig {
  std::string generator;  // geodesic_sphere, ellipse, revolution, two_ball_hull
  int dim = 2;
  int resolution = 0;
  double radius = 0.0;
  std::vector<double> center_offset;
  std::vector<double> axes;
  double r0 = 0.0;
  std::vector<std::pair<int, double>> harmonics;
  double separation = 0.0;
  double smoothing = 0.0;
};

struct RollingConfig {
  std::string expect_rigidity;  // empty: not checked
  bool expect_equality = false;
  bool key_inequality = true;
  bool diameter = true;
  bool volume = true;
  int diameter_resolution = 0;
};

struct RadialConfig {
  std::vector<double> point;  // tangent coordinates of p at the model origin
  int trajectories = 4;
  double step = 1e-3;
  bool expect_equality = false;
  std::optional<double> control_lambda;
  double min_convergence_ratio = 1.8;
};

struct HoroballConfig {
  bool reversed = false;
  bool reversed_control = false;
  int busemann_samples = 100;
  double busemann_t_max = 30.0;
  int horocycles = 0;  // level sets exported per seed (m = 2)
};

struct CounterexampleConfig {
  double separation_rel = 3.0;  // center distance / R_lambda
  double smoothing = 0.0;
  int resolution = 0;
  bool expect_penetration = true;
};

struct MetricConfig {
  std::string name;  // euclidean, round_sphere, hyperbolic, perturbed_sphere, revolution
  double c = 1.0;
  double eps = 0.0;
  std::string profile = "sine_series";
  std::vector<std::pair<int, double>> sine_terms;
};

struct Riemannian2dConfig {
  MetricConfig metric;
  std::array<double, 2> oval_center{0.0, 0.0};
  std::array<double, 2> oval_axes{0.0, 0.0};
  int curve_samples = 256;
  int curvature_samples = 256;
  double region_padding = 0.05;
  std::optional<std::array<double, 4>> curvature_box;  // u0_lo, u1_lo, u0_hi, u1_hi
  std::optional<std::array<double, 2>> curvature_bounds;
  int toponogov_count = 50;
  double toponogov_size = 0.3;
};

struct Scenario {
  std::string id;
  std::string module;  // rolling, rac, liouville, horoball, riemannian2d, counterexample
  std::string description;
  double curvature = 0.0;
  std::optional<double> lambda;  // absent: certified minimum normal curvature
  std::optional<BodyConfig> body;
  int seed_count = 32;
  Tolerances tol;
  RollingConfig rolling;
  RadialConfig radial;
  HoroballConfig horoball;
  CounterexampleConfig counterexample;
  Riemannian2dConfig riemannian2d;

  Json normalized() const;  // canonical document with every default spelled out
};

// Throws Error(kInvalidInput) with a JSON-pointer field path on malformed input.
Scenario parse_scenario(const Json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
// Unknown keys are rejected.
void apply_tolerance_override(Scenario& s, const std::string& key, double value);

// ---- reports ----------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  std::string relation;  // ">=", "<=", ">", "<", "==" (categorical)
  double value = 0.0;
  double bound = 0.0;
  std::string tolerance_key;
  double margin = 0.0;  // >= 0 (or > 0 for strict relations) iff passed
  bool has_margin = true;
  bool passed = false;
  std::string error;
  Json detail = Json::object();
};

CheckResult check_at_least(const std::string& name, double value, double bound, const std::string& tol_key,
                           bool strict = false);
CheckResult check_at_most(const std::string& name, double value, double bound, const std::string& tol_key,
                          bool strict = false);
CheckResult check_equals(const std::string& name, const std::string& value, const std::string& expected);
CheckResult check_error(const std::string& name, const std::string& message);

struct CsvTable {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_number(double v);  // "%.17g", "nan", "inf", "-inf"
std::string to_csv(const CsvTable& t);
std::string sha256_hex(const std::string& bytes);

struct RunOutcome {
  Scenario scenario;
  std::vector<CheckResult> checks;
  Json summary = Json::object();
  std::vector<CsvTable> sidecars;
  double lambda = 0.0;
  double R_lambda = 0.0;
  double runtime_seconds = 0.0;
  std::string input_hash;
  std::string timestamp;

  bool passed() const;
  double worst_margin() const;  // NaN when no check carries a margin
  std::vector<std::string> failing_checks() const;
  Json report() const;      // deterministic
  Json run_record() const;  // report + scenario + version, timestamp, runtime, input hash
};

RunOutcome run_scenario(const Scenario& s);
// Writes <out>/<id>/{report.json, run.json, *.csv}; returns the scenario directory.
std::filesystem::path write_run(const RunOutcome& run, const std::filesystem::path& out_dir);

std::filesystem::path default_out_dir();  // $ROLLKIT_OUT_DIR or ./rollkit-out

// ---- suites -----------------------------------------------------------------------------

struct SuiteRow {
  std::string id;
  std::string file;
  std::string verdict;  // PASS, FAIL or ERROR
  double worst_margin = 0.0;
  double runtime_seconds = 0.0;
  std::string failing;  // failing checks or error message
};

struct SuiteResult {
  std::vector<SuiteRow> rows;  // sorted by id
  bool all_passed() const;
  std::string csv() const;
  std::string table() const;
};

SuiteResult run_suite(const std::filesystem::path& dir, const std::filesystem::path& out_dir, int workers,
                      const std::vector<std::pair<std::string, double>>& overrides);

}  // namespace rollkit
