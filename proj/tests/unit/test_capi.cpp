#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rollkit.h"

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

const char* kEllipse = R"({"id": "capi_ellipse", "module": "rolling", "curvature": 0.0, "lambda": 0.25,
  "body": {"generator": "ellipse", "dim": 2, "resolution": 128, "params": {"axes": [2.0, 1.0]}},
  "seeds": {"count": 4}})";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rollkit_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(rk_status_name(RK_OK), "ok");
  EXPECT_STREQ(rk_status_name(RK_ERR_VALIDATION), "validation error");
  for (int st = RK_OK; st <= RK_ERR_INTERNAL; ++st) EXPECT_GT(std::string(rk_status_name(rk_status(st))).size(), 0u);
  EXPECT_GT(std::string(rk_version()).size(), 0u);
}

TEST(CApi, NullArgumentsAreRejected) {
  rk_scenario* s = nullptr;
  EXPECT_EQ(rk_scenario_parse(nullptr, &s), RK_ERR_ARG);
  EXPECT_EQ(rk_scenario_parse(kEllipse, nullptr), RK_ERR_ARG);
  EXPECT_EQ(rk_scenario_load(nullptr, &s), RK_ERR_ARG);
  EXPECT_EQ(rk_run_scenario(nullptr, nullptr), RK_ERR_ARG);
  EXPECT_EQ(rk_sn(1.0, 0.5, nullptr), RK_ERR_ARG);
  EXPECT_EQ(rk_distance(0.0, 2, nullptr, nullptr, nullptr), RK_ERR_ARG);
  EXPECT_EQ(rk_suite_run(nullptr, "x", 1, nullptr, 0, nullptr), RK_ERR_ARG);
  EXPECT_EQ(rk_plot(nullptr, nullptr), RK_ERR_ARG);
  EXPECT_GT(std::string(rk_last_error()).size(), 0u);
  rk_scenario_free(nullptr);
  rk_run_free(nullptr);
  rk_suite_free(nullptr);
}

TEST(CApi, ParseErrorsAreClassified) {
  rk_scenario* s = nullptr;
  EXPECT_EQ(rk_scenario_parse("{ nope", &s), RK_ERR_PARSE);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(rk_scenario_parse(R"({"id": "x", "module": "rolling"})", &s), RK_ERR_VALIDATION);
  EXPECT_EQ(std::string(rk_last_error()).rfind("/curvature", 0), 0u) << rk_last_error();
  EXPECT_EQ(rk_scenario_load("/nonexistent/file.json", &s), RK_ERR_IO);
}

TEST(CApi, ScenarioHandle) {
  rk_scenario* s = nullptr;
  ASSERT_EQ(rk_scenario_parse(kEllipse, &s), RK_OK);
  EXPECT_STREQ(rk_scenario_id(s), "capi_ellipse");
  EXPECT_STREQ(rk_scenario_module(s), "rolling");
  rk_scenario* again = nullptr;
  ASSERT_EQ(rk_scenario_parse(rk_scenario_json(s), &again), RK_OK);
  EXPECT_STREQ(rk_scenario_json(s), rk_scenario_json(again));
  EXPECT_EQ(rk_scenario_set_tolerance(s, "inclusion", 1e-5), RK_OK);
  EXPECT_EQ(rk_scenario_set_tolerance(s, "bogus", 1e-5), RK_ERR_VALIDATION);
  EXPECT_NE(std::string(rk_scenario_json(s)).find("\"inclusion\": 1e-05"), std::string::npos);
  rk_scenario_free(s);
  rk_scenario_free(again);
}

TEST(CApi, RunWriteAndPlot) {
  rk_scenario* s = nullptr;
  ASSERT_EQ(rk_scenario_parse(kEllipse, &s), RK_OK);
  rk_run* r = nullptr;
  ASSERT_EQ(rk_run_scenario(s, &r), RK_OK);
  EXPECT_EQ(rk_run_passed(r), 1);
  EXPECT_GE(rk_run_worst_margin(r), 0.0);
  EXPECT_GE(rk_run_runtime(r), 0.0);
  const size_t n = rk_run_check_count(r);
  ASSERT_GT(n, 0u);
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    int passed = 0;
    double margin = 0.0;
    ASSERT_EQ(rk_run_check(r, i, &name, &passed, &margin), RK_OK);
    EXPECT_GT(std::string(name).size(), 0u);
    EXPECT_EQ(passed, 1);
  }
  EXPECT_EQ(rk_run_check(r, n, nullptr, nullptr, nullptr), RK_ERR_ARG);
  EXPECT_NE(std::string(rk_run_report_json(r)).find("capi_ellipse"), std::string::npos);

  const fs::path out = scratch("run");
  ASSERT_EQ(rk_run_write(r, out.c_str()), RK_OK);
  const fs::path dir = out / "capi_ellipse";
  EXPECT_EQ(slurp(dir / "report.json").substr(0, 1), "{");
  const fs::path svg = out / "plot.svg";
  ASSERT_EQ(rk_plot((dir / "run.json").c_str(), svg.c_str()), RK_OK) << rk_last_error();
  EXPECT_NE(slurp(svg).find("<svg"), std::string::npos);
  EXPECT_EQ(rk_plot((out / "missing.json").c_str(), svg.c_str()), RK_ERR_IO);
  rk_run_free(r);
  rk_scenario_free(s);
  fs::remove_all(out);
}

TEST(CApi, SuiteThroughHandles) {
  const fs::path in = scratch("suite_in"), out = scratch("suite_out");
  std::ofstream(in / "a.json") << kEllipse;
  rk_suite* suite = nullptr;
  const rk_tolerance tol[] = {{"inclusion", 1e-6}};
  ASSERT_EQ(rk_suite_run(in.c_str(), out.c_str(), 1, tol, 1, &suite), RK_OK);
  ASSERT_EQ(rk_suite_size(suite), 1u);
  const char *id = nullptr, *verdict = nullptr;
  double margin = 0.0, runtime = 0.0;
  ASSERT_EQ(rk_suite_row(suite, 0, &id, &verdict, &margin, &runtime), RK_OK);
  EXPECT_STREQ(id, "capi_ellipse");
  EXPECT_STREQ(verdict, "PASS");
  EXPECT_EQ(rk_suite_passed(suite), 1);
  EXPECT_NE(std::string(rk_suite_table(suite)).find("1/1"), std::string::npos);
  EXPECT_EQ(rk_suite_row(suite, 1, &id, &verdict, &margin, &runtime), RK_ERR_ARG);
  rk_suite_free(suite);
  EXPECT_EQ(rk_suite_run((in / "missing").c_str(), out.c_str(), 1, nullptr, 0, &suite), RK_ERR_IO);
  fs::remove_all(in);
  fs::remove_all(out);
}

TEST(CApi, ModelSpaceFunctions) {
  double v = 0.0;
  ASSERT_EQ(rk_sn(1.0, kPi / 2, &v), RK_OK);
  EXPECT_NEAR(v, 1.0, 1e-15);
  ASSERT_EQ(rk_sn(-1.0, 1.0, &v), RK_OK);
  EXPECT_NEAR(v, std::sinh(1.0), 1e-15);
  ASSERT_EQ(rk_ct(0.0, 2.0, &v), RK_OK);
  EXPECT_NEAR(v, 0.5, 1e-15);
  ASSERT_EQ(rk_characteristic_radius(0.0, 0.25, &v), RK_OK);
  EXPECT_NEAR(v, 4.0, 1e-15);
  ASSERT_EQ(rk_characteristic_radius(1.0, 1.0, &v), RK_OK);
  EXPECT_NEAR(v, kPi / 4, 1e-15);
  EXPECT_EQ(rk_characteristic_radius(-1.0, 0.5, &v), RK_ERR_DOMAIN);

  const double p[] = {0.0, 0.0}, q[] = {3.0, 4.0};
  ASSERT_EQ(rk_distance(0.0, 2, p, q, &v), RK_OK);
  EXPECT_NEAR(v, 5.0, 1e-15);
  const double h0[] = {1.0, 0.0, 0.0}, h1[] = {std::cosh(2.0), std::sinh(2.0), 0.0};
  ASSERT_EQ(rk_distance(-1.0, 2, h0, h1, &v), RK_OK);
  EXPECT_NEAR(v, 2.0, 1e-12);
  // Off the hyperboloid: rejected as invalid input.
  const double off[] = {2.0, 0.0, 0.0};
  EXPECT_EQ(rk_distance(-1.0, 2, h0, off, &v), RK_ERR_VALIDATION);

  ASSERT_EQ(rk_model_third_side(0.0, 3.0, 4.0, kPi / 2, &v), RK_OK);
  EXPECT_NEAR(v, 5.0, 1e-14);

  const double dir[] = {0.0, 1.0, 0.0};
  ASSERT_EQ(rk_busemann(-1.0, 2, h0, dir, h1, &v), RK_OK);
  EXPECT_NEAR(v, 2.0, 1e-12);
  EXPECT_EQ(rk_busemann(0.0, 2, p, q, p, &v), RK_ERR_DOMAIN);
}

TEST(CApi, DefaultOutDirFollowsEnvironment) {
  unsetenv("ROLLKIT_OUT_DIR");
  EXPECT_STREQ(rk_default_out_dir(), "rollkit-out");
  setenv("ROLLKIT_OUT_DIR", "/tmp/rk", 1);
  EXPECT_STREQ(rk_default_out_dir(), "/tmp/rk");
  unsetenv("ROLLKIT_OUT_DIR");
}

}  // namespace
