// rollkit command line: run one scenario, run a directory of scenarios, or
// render a run record. Talks to the library only through the C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rollkit.h"

namespace {

enum Exit { kPassed = 0, kChecksFailed = 1, kBadInput = 2, kRuntimeError = 3 };

int exit_for(rk_status s) {
  return s == RK_ERR_PARSE || s == RK_ERR_VALIDATION || s == RK_ERR_ARG ? kBadInput : kRuntimeError;
}

int report_error(const char* what, rk_status s) {
  std::fprintf(stderr, "rollkit: %s: %s: %s\n", what, rk_status_name(s), rk_last_error());
  return exit_for(s);
}

struct Override {
  std::string key;
  double value;
};

bool parse_override(const std::string& text, Override& out) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  out.key = text.substr(0, eq);
  char* end = nullptr;
  const std::string v = text.substr(eq + 1);
  out.value = std::strtod(v.c_str(), &end);
  return !v.empty() && end && *end == '\0';
}

std::string fmt(const nlohmann::ordered_json& v) {
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print_checks(const char* report_json) {
  const auto report = nlohmann::ordered_json::parse(report_json);
  std::printf("%s  %s\n", report["id"].get<std::string>().c_str(), report["verdict"].get<std::string>().c_str());
  for (const auto& c : report["checks"]) {
    std::printf("  [%s] %-26s", c["verdict"].get<std::string>().c_str(), c["name"].get<std::string>().c_str());
    if (!c["error"].is_null()) {
      std::printf(" error: %s\n", c["error"].get<std::string>().c_str());
    } else {
      std::printf(" %s %s %s\n", fmt(c["value"]).c_str(), c["relation"].get<std::string>().c_str(),
                  fmt(c["bound"]).c_str());
    }
  }
  const auto& failing = report["failing_checks"];
  if (!failing.empty()) {
    std::string names;
    for (const auto& n : failing) names += (names.empty() ? "" : ", ") + n.get<std::string>();
    std::fprintf(stderr, "rollkit: failing checks: %s\n", names.c_str());
  }
}

int cmd_run(const std::string& path, const std::string& out_dir, const std::vector<Override>& overrides) {
  rk_scenario* sc = nullptr;
  if (rk_status s = rk_scenario_load(path.c_str(), &sc); s != RK_OK) return report_error(path.c_str(), s);
  for (const auto& o : overrides) {
    if (rk_status s = rk_scenario_set_tolerance(sc, o.key.c_str(), o.value); s != RK_OK) {
      rk_scenario_free(sc);
      return report_error("--tol-override", s);
    }
  }
  rk_run* run = nullptr;
  rk_status s = rk_run_scenario(sc, &run);
  rk_scenario_free(sc);
  if (s != RK_OK) return report_error(path.c_str(), s);
  print_checks(rk_run_report_json(run));
  if (s = rk_run_write(run, out_dir.c_str()); s != RK_OK) {
    rk_run_free(run);
    return report_error("write", s);
  }
  const int code = rk_run_passed(run) ? kPassed : kChecksFailed;
  rk_run_free(run);
  return code;
}

int cmd_suite(const std::string& dir, const std::string& out_dir, int workers, const std::vector<Override>& overrides) {
  std::vector<rk_tolerance> tol;
  for (const auto& o : overrides) tol.push_back({o.key.c_str(), o.value});
  rk_suite* suite = nullptr;
  if (rk_status s = rk_suite_run(dir.c_str(), out_dir.c_str(), workers, tol.data(), tol.size(), &suite); s != RK_OK) {
    return report_error(dir.c_str(), s);
  }
  std::fputs(rk_suite_table(suite), stdout);
  const int code = rk_suite_passed(suite) ? kPassed : kChecksFailed;
  rk_suite_free(suite);
  return code;
}

int cmd_plot(const std::string& record, const std::string& out) {
  namespace fs = std::filesystem;
  fs::path svg;
  if (out.empty()) {
    const fs::path r(record);
    svg = (fs::is_directory(r) ? r : r.parent_path()) / "plot.svg";
  } else {
    svg = fs::path(out).extension() == ".svg" ? fs::path(out) : fs::path(out) / "plot.svg";
  }
  if (rk_status s = rk_plot(record.c_str(), svg.string().c_str()); s != RK_OK) return report_error(record.c_str(), s);
  std::printf("%s\n", svg.string().c_str());
  return kPassed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rollkit: numerical checks of ball rolling and comparison theorems in constant-curvature spaces"};
  app.set_version_flag("--version", std::string(rk_version()));
  app.require_subcommand(1);

  std::string out_dir;
  int workers = 1;
  std::vector<std::string> override_text;
  app.add_option("--out", out_dir, "output directory (default: $ROLLKIT_OUT_DIR or ./rollkit-out)");
  app.add_option("--workers", workers, "concurrent scenarios in a suite")->check(CLI::Range(1, 256));
  app.add_option("--tol-override", override_text, "tolerance override key=value (repeatable)");

  std::string scenario, dir, record;
  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenario, "scenario JSON file")->required();
  auto* suite = app.add_subcommand("suite", "run every *.json scenario in a directory");
  suite->add_option("dir", dir, "scenario directory")->required();
  auto* plot = app.add_subcommand("plot", "render run.json (or its directory) as SVG");
  plot->add_option("run_record", record, "run.json or the scenario output directory")->required();
  for (auto* sub : {run, suite, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  std::vector<Override> overrides;
  for (const auto& t : override_text) {
    Override o;
    if (!parse_override(t, o)) {
      std::fprintf(stderr, "rollkit: --tol-override expects key=value, got '%s'\n", t.c_str());
      return kBadInput;
    }
    overrides.push_back(o);
  }
  const std::string out = out_dir.empty() ? std::string(rk_default_out_dir()) : out_dir;

  if (*run) return cmd_run(scenario, out, overrides);
  if (*suite) return cmd_suite(dir, out, workers, overrides);
  return cmd_plot(record, out_dir);
}
