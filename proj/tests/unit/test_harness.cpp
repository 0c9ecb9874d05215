#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rollkit/error.hpp"
#include "rollkit/harness.hpp"

namespace rollkit {
namespace {

namespace fs = std::filesystem;

const fs::path kSource = ROLLKIT_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rollkit_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json ellipse_doc() {
  return Json::parse(R"({
    "id": "ellipse_small",
    "module": "rolling",
    "curvature": 0.0,
    "lambda": 0.25,
    "body": {"generator": "ellipse", "dim": 2, "resolution": 128, "params": {"axes": [2.0, 1.0]}},
    "seeds": {"count": 4}
  })");
}

std::string error_message(const Json& doc) {
  try {
    parse_scenario(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
    return e.what();
  }
  ADD_FAILURE() << "document parsed";
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

TEST(ScenarioParse, MinimalDocument) {
  const Scenario s = parse_scenario(ellipse_doc());
  EXPECT_EQ(s.id, "ellipse_small");
  EXPECT_EQ(s.module, "rolling");
  ASSERT_TRUE(s.lambda.has_value());
  EXPECT_EQ(*s.lambda, 0.25);
  ASSERT_TRUE(s.body.has_value());
  EXPECT_EQ(s.body->axes, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(s.seed_count, 4);
  EXPECT_EQ(s.tol.inclusion, 1e-6);
}

TEST(ScenarioParse, ErrorsCarryFieldPath) {
  Json d = ellipse_doc();
  d.erase("id");
  EXPECT_TRUE(starts_with(error_message(d), "/id:"));

  d = ellipse_doc();
  d["body"]["params"]["axes"][1] = -1.0;
  EXPECT_TRUE(starts_with(error_message(d), "/body/params/axes/1:"));

  d = ellipse_doc();
  d["seeds"]["count"] = 0;
  EXPECT_TRUE(starts_with(error_message(d), "/seeds/count:"));

  d = ellipse_doc();
  d["module"] = "teleport";
  EXPECT_TRUE(starts_with(error_message(d), "/module:"));

  d = ellipse_doc();
  d["lambda"] = "sometimes";
  EXPECT_TRUE(starts_with(error_message(d), "/lambda:"));

  d = ellipse_doc();
  d["tolerances"] = {{"inclusion", -1.0}};
  EXPECT_TRUE(starts_with(error_message(d), "/tolerances/inclusion:"));
}

TEST(ScenarioParse, UnknownFieldsRejectedNullAccepted) {
  Json d = ellipse_doc();
  d["bogus"] = 1;
  EXPECT_TRUE(starts_with(error_message(d), "/bogus:"));
  d = ellipse_doc();
  d["body"]["params"]["radius"] = 1.0;
  EXPECT_NE(error_message(d).find("/body/params/radius"), std::string::npos);
  d = ellipse_doc();
  d["options"] = {{"expect_rigidity", nullptr}};
  EXPECT_EQ(parse_scenario(d).rolling.expect_rigidity, "");
}

TEST(ScenarioParse, DomainConstraints) {
  Json d = ellipse_doc();
  d["curvature"] = -1.0;
  d["lambda"] = 0.5;
  EXPECT_NE(error_message(d).find("sphere constraints"), std::string::npos);
  d = Json::parse(R"({"id": "h", "module": "horoball", "curvature": 0.0, "lambda": 1.0,
                      "body": {"generator": "geodesic_sphere", "dim": 2, "params": {"radius": 0.5}}})");
  EXPECT_TRUE(starts_with(error_message(d), "/curvature:"));
  d["curvature"] = -1.0;
  d["lambda"] = 0.5;
  EXPECT_NE(error_message(d).find("horoball constraints"), std::string::npos);
  d = ellipse_doc();
  d["id"] = "bad id";
  EXPECT_TRUE(starts_with(error_message(d), "/id:"));
}

TEST(ScenarioParse, MalformedTextAndMissingFile) {
  try {
    parse_scenario_text("{ not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
    EXPECT_NE(std::string(e.what()).find("malformed JSON"), std::string::npos);
  }
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ScenarioParse, NormalizedDocumentsRoundTrip) {
  std::size_t n = 0;
  for (const char* sub : {"scenarios/acceptance", "scenarios/negative"}) {
    for (const auto& e : fs::directory_iterator(kSource / sub)) {
      const Scenario s = load_scenario(e.path());
      const Json once = s.normalized();
      const Json twice = parse_scenario(once).normalized();
      EXPECT_EQ(once.dump(), twice.dump()) << e.path();
      ++n;
    }
  }
  EXPECT_GE(n, 12u);
}

TEST(Overrides, ApplyKnownKeysOnly) {
  Scenario s = parse_scenario(ellipse_doc());
  apply_tolerance_override(s, "inclusion", 1e-3);
  EXPECT_EQ(s.tol.inclusion, 1e-3);
  for (const auto& key : Tolerances::keys()) {
    apply_tolerance_override(s, key, 0.5);
    EXPECT_EQ(*s.tol.find(key), 0.5);
  }
  EXPECT_THROW(apply_tolerance_override(s, "bogus", 1.0), Error);
  EXPECT_THROW(apply_tolerance_override(s, "inclusion", 0.0), Error);
  EXPECT_THROW(apply_tolerance_override(s, "inclusion", std::nan("")), Error);
}

TEST(Checks, MarginsAreSigned) {
  const CheckResult a = check_at_least("a", 3.0, 1.0, "inclusion");
  EXPECT_TRUE(a.passed);
  EXPECT_EQ(a.margin, 2.0);
  const CheckResult b = check_at_most("b", 3.0, 1.0, "inclusion");
  EXPECT_FALSE(b.passed);
  EXPECT_EQ(b.margin, -2.0);
  EXPECT_FALSE(check_at_least("c", 1.0, 1.0, "", true).passed);
  EXPECT_TRUE(check_at_least("c", 1.0, 1.0, "").passed);
  EXPECT_TRUE(check_equals("d", "i", "i").passed);
  EXPECT_FALSE(check_equals("d", "ii", "i").passed);
  const CheckResult e = check_error("e", "boom");
  EXPECT_FALSE(e.passed);
  EXPECT_EQ(e.error, "boom");
}

TEST(Csv, NumberFormatAndWidth) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  CsvTable t{"x.csv", {"a", "b"}, {{1.0, 0.5}, {-3.0, 1e-20}}};
  EXPECT_EQ(to_csv(t), "a,b\n1,0.5\n-3,9.9999999999999995e-21\n");
  t.rows.push_back({1.0});
  EXPECT_THROW(to_csv(t), Error);
  EXPECT_DOUBLE_EQ(std::stod(format_number(M_PI)), M_PI);
}

TEST(Digest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Run, EllipseScenarioPassesDeterministically) {
  const Scenario s = parse_scenario(ellipse_doc());
  const RunOutcome a = run_scenario(s), b = run_scenario(s);
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(a.failing_checks().empty());
  EXPECT_GE(a.worst_margin(), 0.0);
  EXPECT_DOUBLE_EQ(a.R_lambda, 4.0);
  EXPECT_EQ(a.report().dump(), b.report().dump());
  const Json rec = a.run_record();
  EXPECT_EQ(rec["input_hash"].get<std::string>().size(), 64u);
  EXPECT_TRUE(rec.contains("timestamp"));
  EXPECT_TRUE(rec.contains("runtime_seconds"));
  EXPECT_FALSE(a.report().contains("timestamp"));
}

TEST(Run, OverstatedLambdaFails) {
  Json d = ellipse_doc();
  d["lambda"] = 0.5;
  const RunOutcome r = run_scenario(parse_scenario(d));
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.failing_checks().empty());
  EXPECT_LT(r.worst_margin(), 0.0);
}

TEST(Run, WritesReportRecordAndSidecars) {
  const fs::path out = scratch("write");
  const RunOutcome r = run_scenario(parse_scenario(ellipse_doc()));
  const fs::path dir = write_run(r, out);
  EXPECT_EQ(dir, out / "ellipse_small");
  EXPECT_EQ(Json::parse(slurp(dir / "report.json")).dump(), r.report().dump());
  EXPECT_TRUE(fs::exists(dir / "run.json"));
  ASSERT_FALSE(r.sidecars.empty());
  for (const CsvTable& t : r.sidecars) {
    const std::string text = slurp(dir / t.file);
    std::string header = text.substr(0, text.find('\n'));
    std::string expected;
    for (std::size_t i = 0; i < t.columns.size(); ++i) expected += (i ? "," : "") + t.columns[i];
    EXPECT_EQ(header, expected) << t.file;
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), std::ptrdiff_t(t.rows.size() + 1));
  }
  fs::remove_all(out);
}

TEST(Suite, EmptyDirectoryHasNoRows) {
  const fs::path in = scratch("empty_in"), out = scratch("empty_out");
  const SuiteResult r = run_suite(in, out, 1, {});
  EXPECT_TRUE(r.rows.empty());
  EXPECT_NE(r.table().find("0/0"), std::string::npos);
  EXPECT_THROW(run_suite(in / "missing", out, 1, {}), Error);
  fs::remove_all(in);
  fs::remove_all(out);
}

TEST(Suite, DuplicateIdsAndNegativesAreReported) {
  const fs::path in = scratch("dup_in"), out = scratch("dup_out");
  Json bad = ellipse_doc();
  bad["lambda"] = 0.5;
  bad["id"] = "overstated";
  std::ofstream(in / "a.json") << ellipse_doc().dump();
  std::ofstream(in / "b.json") << ellipse_doc().dump();
  std::ofstream(in / "c.json") << bad.dump();
  std::ofstream(in / "d.json") << "{";
  std::ofstream(in / "notes.txt") << "ignored";
  const SuiteResult r = run_suite(in, out, 2, {{"inclusion", 1e-6}});
  ASSERT_EQ(r.rows.size(), 4u);
  std::map<std::string, std::string> by_file;
  for (const SuiteRow& row : r.rows) by_file[row.file] = row.verdict;
  EXPECT_EQ(by_file["a.json"], "PASS");
  EXPECT_EQ(by_file["b.json"], "ERROR");
  EXPECT_EQ(by_file["c.json"], "FAIL");
  EXPECT_EQ(by_file["d.json"], "ERROR");
  EXPECT_FALSE(r.all_passed());
  EXPECT_NE(r.table().find("1/4"), std::string::npos);
  EXPECT_TRUE(starts_with(r.csv(), "id,file,verdict,worst_margin,runtime_seconds,failing\n"));
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LE(r.rows[i - 1].id, r.rows[i].id);
  // An unknown override is a per-scenario input error.
  for (const SuiteRow& row : run_suite(in, out, 1, {{"bogus", 1.0}}).rows) EXPECT_EQ(row.verdict, "ERROR");
  fs::remove_all(in);
  fs::remove_all(out);
}

TEST(Environment, DefaultOutDir) {
  unsetenv("ROLLKIT_OUT_DIR");
  EXPECT_EQ(default_out_dir(), fs::path("rollkit-out"));
  setenv("ROLLKIT_OUT_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(default_out_dir(), fs::path("/tmp/elsewhere"));
  unsetenv("ROLLKIT_OUT_DIR");
  EXPECT_FALSE(version_string().empty());
}

}  // namespace
}  // namespace rollkit
