#include "rollkit.h"

#include <exception>
#include <string>
#include <vector>

#include "rollkit/harness.hpp"
#include "rollkit/horoball.hpp"
#include "rollkit/model_space.hpp"
#include "rollkit/plot.hpp"

struct rk_scenario {
  rollkit::Scenario scenario;
  std::string json;
};

struct rk_run {
  rollkit::RunOutcome outcome;
  std::string report;
};

struct rk_suite {
  rollkit::SuiteResult result;
  std::string table;
};

namespace {

thread_local std::string g_last_error;

rk_status set_error(rk_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

rk_status map_error(const rollkit::Error& e) {
  using rollkit::ErrorCode;
  const std::string what = e.what();
  switch (e.code()) {
    case ErrorCode::kInvalidInput:
      return set_error(what.find("malformed JSON") != std::string::npos ? RK_ERR_PARSE : RK_ERR_VALIDATION, what);
    case ErrorCode::kDomain: return set_error(RK_ERR_DOMAIN, what);
    case ErrorCode::kNumerical: return set_error(RK_ERR_NUMERIC, what);
    case ErrorCode::kIo: return set_error(RK_ERR_IO, what);
    case ErrorCode::kCertification: return set_error(RK_ERR_CERTIFICATION, what);
  }
  return set_error(RK_ERR_INTERNAL, what);
}

template <class F>
rk_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return RK_OK;
  } catch (const rollkit::Error& e) {
    return map_error(e);
  } catch (const std::exception& e) {
    return set_error(RK_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RK_ERR_INTERNAL, "unknown exception");
  }
}

rk_status null_arg(const char* what) { return set_error(RK_ERR_ARG, std::string("null argument: ") + what); }

rollkit::ModelPoint point_of(const rollkit::Curvature& c, int m, const double* x) {
  const int n = c.sign() == 0 ? m : m + 1;
  rollkit::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = x[i];
  return rollkit::make_point(c, v, 1e-10);
}

}  // namespace

extern "C" {

const char* rk_last_error(void) { return g_last_error.c_str(); }

const char* rk_version(void) {
  static const std::string v = rollkit::version_string();
  return v.c_str();
}

const char* rk_status_name(rk_status status) {
  switch (status) {
    case RK_OK: return "ok";
    case RK_ERR_PARSE: return "parse error";
    case RK_ERR_VALIDATION: return "validation error";
    case RK_ERR_DOMAIN: return "domain error";
    case RK_ERR_NUMERIC: return "numerical error";
    case RK_ERR_IO: return "i/o error";
    case RK_ERR_CERTIFICATION: return "certification error";
    case RK_ERR_ARG: return "bad argument";
    case RK_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rk_status rk_scenario_load(const char* path, rk_scenario** out) {
  if (!path || !out) return null_arg("path/out");
  *out = nullptr;
  return guarded([&] {
    auto* h = new rk_scenario{rollkit::load_scenario(path), {}};
    h->json = h->scenario.normalized().dump(2);
    *out = h;
  });
}

rk_status rk_scenario_parse(const char* json, rk_scenario** out) {
  if (!json || !out) return null_arg("json/out");
  *out = nullptr;
  return guarded([&] {
    auto* h = new rk_scenario{rollkit::parse_scenario_text(json), {}};
    h->json = h->scenario.normalized().dump(2);
    *out = h;
  });
}

rk_status rk_scenario_set_tolerance(rk_scenario* scenario, const char* key, double value) {
  if (!scenario || !key) return null_arg("scenario/key");
  return guarded([&] {
    rollkit::apply_tolerance_override(scenario->scenario, key, value);
    scenario->json = scenario->scenario.normalized().dump(2);
  });
}

const char* rk_scenario_id(const rk_scenario* scenario) { return scenario ? scenario->scenario.id.c_str() : ""; }
const char* rk_scenario_module(const rk_scenario* scenario) {
  return scenario ? scenario->scenario.module.c_str() : "";
}
const char* rk_scenario_json(const rk_scenario* scenario) { return scenario ? scenario->json.c_str() : ""; }
void rk_scenario_free(rk_scenario* scenario) { delete scenario; }

rk_status rk_run_scenario(const rk_scenario* scenario, rk_run** out) {
  if (!scenario || !out) return null_arg("scenario/out");
  *out = nullptr;
  return guarded([&] {
    auto* h = new rk_run{rollkit::run_scenario(scenario->scenario), {}};
    h->report = h->outcome.report().dump(2);
    *out = h;
  });
}

int rk_run_passed(const rk_run* run) { return run && run->outcome.passed() ? 1 : 0; }
double rk_run_worst_margin(const rk_run* run) { return run ? run->outcome.worst_margin() : 0.0; }
double rk_run_runtime(const rk_run* run) { return run ? run->outcome.runtime_seconds : 0.0; }
size_t rk_run_check_count(const rk_run* run) { return run ? run->outcome.checks.size() : 0; }

rk_status rk_run_check(const rk_run* run, size_t i, const char** name, int* passed, double* margin) {
  if (!run) return null_arg("run");
  if (i >= run->outcome.checks.size()) return set_error(RK_ERR_ARG, "check index out of range");
  const auto& c = run->outcome.checks[i];
  if (name) *name = c.name.c_str();
  if (passed) *passed = c.passed ? 1 : 0;
  if (margin) *margin = c.has_margin ? c.margin : 0.0;
  return RK_OK;
}

const char* rk_run_report_json(const rk_run* run) { return run ? run->report.c_str() : ""; }

rk_status rk_run_write(const rk_run* run, const char* out_dir) {
  if (!run || !out_dir) return null_arg("run/out_dir");
  return guarded([&] { rollkit::write_run(run->outcome, out_dir); });
}

void rk_run_free(rk_run* run) { delete run; }

rk_status rk_suite_run(const char* dir, const char* out_dir, int workers, const rk_tolerance* overrides,
                       size_t n_overrides, rk_suite** out) {
  if (!dir || !out_dir || !out || (n_overrides && !overrides)) return null_arg("dir/out_dir/out/overrides");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::pair<std::string, double>> ov;
    for (size_t i = 0; i < n_overrides; ++i) {
      if (!overrides[i].key) rollkit::fail(rollkit::ErrorCode::kInvalidInput, "null tolerance key");
      ov.emplace_back(overrides[i].key, overrides[i].value);
    }
    auto* h = new rk_suite{rollkit::run_suite(dir, out_dir, workers, ov), {}};
    h->table = h->result.table();
    *out = h;
  });
}

size_t rk_suite_size(const rk_suite* suite) { return suite ? suite->result.rows.size() : 0; }

rk_status rk_suite_row(const rk_suite* suite, size_t i, const char** id, const char** verdict, double* worst_margin,
                       double* runtime) {
  if (!suite) return null_arg("suite");
  if (i >= suite->result.rows.size()) return set_error(RK_ERR_ARG, "row index out of range");
  const auto& r = suite->result.rows[i];
  if (id) *id = r.id.c_str();
  if (verdict) *verdict = r.verdict.c_str();
  if (worst_margin) *worst_margin = r.worst_margin;
  if (runtime) *runtime = r.runtime_seconds;
  return RK_OK;
}

int rk_suite_passed(const rk_suite* suite) { return suite && suite->result.all_passed() ? 1 : 0; }
const char* rk_suite_table(const rk_suite* suite) { return suite ? suite->table.c_str() : ""; }
void rk_suite_free(rk_suite* suite) { delete suite; }

rk_status rk_plot(const char* run_record, const char* svg_out) {
  if (!run_record || !svg_out) return null_arg("run_record/svg_out");
  return guarded([&] { rollkit::write_plot(run_record, svg_out); });
}

const char* rk_default_out_dir(void) {
  thread_local std::string dir;
  dir = rollkit::default_out_dir().string();
  return dir.c_str();
}

rk_status rk_sn(double c, double t, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = rollkit::sn(rollkit::Curvature(c), t); });
}

rk_status rk_ct(double c, double t, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = rollkit::ct(rollkit::Curvature(c), t); });
}

rk_status rk_characteristic_radius(double c, double lambda, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = rollkit::characteristic_radius(rollkit::Curvature(c), lambda); });
}

rk_status rk_distance(double c, int m, const double* p, const double* q, double* out) {
  if (!p || !q || !out) return null_arg("p/q/out");
  if (m < 1 || m > rollkit::kMaxAmbient - 1) return set_error(RK_ERR_ARG, "unsupported dimension");
  return guarded([&] {
    const rollkit::Curvature k(c);
    *out = rollkit::distance(point_of(k, m, p), point_of(k, m, q));
  });
}

rk_status rk_model_third_side(double c, double a, double b, double angle, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = rollkit::model_third_side(rollkit::Curvature(c), a, b, angle); });
}

rk_status rk_busemann(double c, int m, const double* base, const double* dir, const double* q, double* out) {
  if (!base || !dir || !q || !out) return null_arg("base/dir/q/out");
  if (m < 1 || m > rollkit::kMaxAmbient - 1) return set_error(RK_ERR_ARG, "unsupported dimension");
  return guarded([&] {
    const rollkit::Curvature k(c);
    const rollkit::ModelPoint b = point_of(k, m, base);
    rollkit::Vec d(b.coords.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = dir[i];
    const rollkit::BusemannRay ray = rollkit::make_busemann_ray({b, rollkit::project_to_tangent(b, d)});
    *out = rollkit::busemann_closed_form(ray, point_of(k, m, q));
  });
}

}  // extern "C"
