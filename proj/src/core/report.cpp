#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "rollkit/error.hpp"
#include "rollkit/harness.hpp"

namespace rollkit {

std::string version_string() { return ROLLKIT_VERSION; }

// ---- checks -----------------------------------------------------------------------------

namespace {

CheckResult make_check(const std::string& name, const char* rel, double value, double bound, const std::string& key,
                       double margin, bool strict) {
  CheckResult c;
  c.name = name;
  c.relation = rel;
  c.value = value;
  c.bound = bound;
  c.tolerance_key = key;
  c.margin = margin;
  c.passed = std::isfinite(value) && (strict ? margin > 0.0 : margin >= 0.0);
  return c;
}

}  // namespace

CheckResult check_at_least(const std::string& name, double value, double bound, const std::string& tol_key,
                           bool strict) {
  return make_check(name, strict ? ">" : ">=", value, bound, tol_key, value - bound, strict);
}

CheckResult check_at_most(const std::string& name, double value, double bound, const std::string& tol_key,
                          bool strict) {
  return make_check(name, strict ? "<" : "<=", value, bound, tol_key, bound - value, strict);
}

CheckResult check_equals(const std::string& name, const std::string& value, const std::string& expected) {
  CheckResult c;
  c.name = name;
  c.relation = "==";
  c.has_margin = false;
  c.passed = value == expected;
  c.detail["observed"] = value;
  c.detail["expected"] = expected;
  return c;
}

CheckResult check_error(const std::string& name, const std::string& message) {
  CheckResult c;
  c.name = name;
  c.relation = "error";
  c.has_margin = false;
  c.passed = false;
  c.error = message;
  return c;
}

// ---- formatting ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) fail(ErrorCode::kInvalidInput, "CSV row width mismatch in " + t.file);
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kIo, "SHA-256 digest failed");
  }
  std::ostringstream ss;
  for (unsigned i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return ss.str();
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json check_json(const CheckResult& c) {
  Json j;
  j["name"] = c.name;
  j["verdict"] = c.passed ? "PASS" : "FAIL";
  j["relation"] = c.relation;
  if (c.relation == "==") {
    j["value"] = c.detail.value("observed", "");
    j["bound"] = c.detail.value("expected", "");
  } else if (c.relation == "error") {
    j["value"] = nullptr;
    j["bound"] = nullptr;
  } else {
    j["value"] = number_or_null(c.value);
    j["bound"] = number_or_null(c.bound);
  }
  j["tolerance_key"] = c.tolerance_key.empty() ? Json(nullptr) : Json(c.tolerance_key);
  j["margin"] = c.has_margin ? number_or_null(c.margin) : Json(nullptr);
  j["error"] = c.error.empty() ? Json(nullptr) : Json(c.error);
  j["detail"] = c.detail;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

// ---- run outcome ----------------------------------------------------------------------------

bool RunOutcome::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

double RunOutcome::worst_margin() const {
  double w = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : checks) {
    if (!c.has_margin || !std::isfinite(c.margin)) continue;
    if (!(w <= c.margin)) w = c.margin;
  }
  return w;
}

std::vector<std::string> RunOutcome::failing_checks() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

Json RunOutcome::report() const {
  Json j;
  j["schema"] = "rollkit.report/1";
  j["id"] = scenario.id;
  j["module"] = scenario.module;
  j["version"] = version_string();
  j["curvature"] = scenario.curvature;
  j["lambda"] = number_or_null(lambda);
  j["R_lambda"] = number_or_null(R_lambda);
  j["verdict"] = passed() ? "PASS" : "FAIL";
  j["worst_margin"] = number_or_null(worst_margin());
  j["failing_checks"] = failing_checks();
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back(check_json(c));
  j["checks"] = cs;
  j["summary"] = summary;
  Json files = Json::array();
  for (const auto& t : sidecars) files.push_back(t.file);
  j["sidecars"] = files;
  return j;
}

Json RunOutcome::run_record() const {
  Json j;
  j["schema"] = "rollkit.run/1";
  j["id"] = scenario.id;
  j["version"] = version_string();
  j["timestamp"] = timestamp;
  j["runtime_seconds"] = runtime_seconds;
  j["input_hash"] = input_hash;
  j["scenario"] = scenario.normalized();
  j["report"] = report();
  return j;
}

std::filesystem::path write_run(const RunOutcome& run, const std::filesystem::path& out_dir) {
  const std::filesystem::path dir = out_dir / run.scenario.id;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "report.json", run.report().dump(2) + "\n");
  write_file(dir / "run.json", run.run_record().dump(2) + "\n");
  for (const auto& t : run.sidecars) write_file(dir / t.file, to_csv(t));
  return dir;
}

std::filesystem::path default_out_dir() {
  const char* env = std::getenv("ROLLKIT_OUT_DIR");
  if (env && *env) return env;
  return "rollkit-out";
}

// ---- suites -------------------------------------------------------------------------------

bool SuiteResult::all_passed() const {
  for (const auto& r : rows)
    if (r.verdict != "PASS") return false;
  return true;
}

std::string SuiteResult::csv() const {
  std::string out = "id,file,verdict,worst_margin,runtime_seconds,failing\n";
  for (const auto& r : rows) {
    out += csv_field(r.id) + "," + csv_field(r.file) + "," + r.verdict + "," + format_number(r.worst_margin) + "," +
           format_number(r.runtime_seconds) + "," + csv_field(r.failing) + "\n";
  }
  return out;
}

std::string SuiteResult::table() const {
  std::size_t w_id = 2;
  for (const auto& r : rows) w_id = std::max(w_id, r.id.size());
  std::ostringstream ss;
  ss << std::left << std::setw(int(w_id)) << "id" << "  " << std::setw(7) << "verdict" << "  " << std::setw(13)
     << "worst_margin" << "  " << std::setw(9) << "runtime_s" << "  failing\n";
  for (const auto& r : rows) {
    char margin[32], runtime[32];
    std::snprintf(margin, sizeof margin, "%.3e", r.worst_margin);
    std::snprintf(runtime, sizeof runtime, "%.3f", r.runtime_seconds);
    ss << std::left << std::setw(int(w_id)) << r.id << "  " << std::setw(7) << r.verdict << "  " << std::setw(13)
       << margin << "  " << std::setw(9) << runtime << "  " << r.failing << "\n";
  }
  std::size_t passed = 0;
  for (const auto& r : rows) passed += r.verdict == "PASS";
  ss << passed << "/" << rows.size() << " scenarios passed\n";
  return ss.str();
}

}  // namespace rollkit
