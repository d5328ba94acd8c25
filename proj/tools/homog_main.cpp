// command line front end; drives experiments through the shared C API
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homog/homog.h"

namespace {

using nlohmann::json;

struct Args {
  std::string config;
  std::string problem;  // shipped family shorthand when no config file
  std::string out = "out";
  std::string eps;       // comma list, entries like 1/8 or 0.125
  std::string variant;
  std::string path;
  std::string dump_fields;
  std::string families;  // diagnostics subset
  long cell_resolution = 0;
  int jobs = 0;
  long long seed = -1;
  bool quiet = false;
};

std::vector<std::string> splitCommas(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = s.find(',', start);
    const size_t end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string overridesFor(const std::string& kind, const Args& a) {
  json ov;
  ov["kind"] = kind;
  if (a.jobs > 0) {
    ov["jobs"] = a.jobs;
  } else if (const char* env = std::getenv("HOMOG_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) ov["jobs"] = j;
  }
  if (a.seed >= 0) ov["seed"] = a.seed;
  if (!a.eps.empty()) ov["eps"] = splitCommas(a.eps);
  if (!a.variant.empty()) ov["variant"] = a.variant;
  if (!a.path.empty()) ov["path"] = a.path;
  if (!a.dump_fields.empty()) ov["dump_fields"] = a.dump_fields;
  if (!a.families.empty()) ov["families"] = splitCommas(a.families);
  if (a.cell_resolution > 0) ov["cell_resolution"] = a.cell_resolution;

  // --out ending in .csv names the artifact instead of the directory
  std::filesystem::path out(a.out);
  if (out.extension() == ".csv") {
    ov["out"] = {{"csv", out.filename().string()},
                 {"report", out.stem().string() + "-report.json"}};
  }
  return ov.dump();
}

std::string outDir(const Args& a) {
  std::filesystem::path out(a.out);
  if (out.extension() == ".csv") {
    const std::string parent = out.parent_path().string();
    return parent.empty() ? "." : parent;
  }
  return a.out;
}

void printReport(const homog_run* run, bool quiet) {
  json rep = json::parse(homog_run_report_json(run));
  if (!rep.value("ok", false)) {
    std::fprintf(stderr, "error: %s\n", rep.value("error", std::string()).c_str());
    return;
  }
  if (quiet) return;
  if (rep.contains("fits")) {
    for (auto& [name, f] : rep.at("fits").items()) {
      if (f.value("has_slope", false)) {
        std::printf("fit %-12s slope %8.4f", name.c_str(), f.value("slope", 0.0));
        if (f.value("has_interval", false))
          std::printf("  +- %.4f", f.value("half_width", 0.0));
        std::printf("\n");
      } else if (f.value("floor_limited", false)) {
        std::printf("fit %-12s floor limited\n", name.c_str());
      }
    }
  }
  for (const json& c : rep.value("criteria", json::array())) {
    std::printf("[%s] %-22s %s\n", c.value("pass", false) ? "pass" : "FAIL",
                c.value("name", std::string()).c_str(),
                c.value("detail", std::string()).c_str());
  }
}

int runExperiment(const std::string& kind, const Args& a) {
  const std::string ov = overridesFor(kind, a);
  homog_run* run = nullptr;
  homog_status st;
  if (!a.config.empty()) {
    st = homog_run_file(a.config.c_str(), ov.c_str(), &run);
  } else if (!a.problem.empty() || kind == "diagnostics") {
    json conf;
    if (!a.problem.empty()) conf["problem"] = a.problem;
    conf["experiment"] = json::object();
    st = homog_run_text(conf.dump().c_str(), ov.c_str(), &run);
  } else {
    std::fprintf(stderr, "error: need --config or --problem\n");
    return 3;
  }
  if (st != HOMOG_OK) {
    std::fprintf(stderr, "error: %s\n", homog_last_error());
    return 3;
  }
  printReport(run, a.quiet);
  char csv_path[4096] = {0};
  const homog_status ws =
      homog_run_write(run, outDir(a).c_str(), csv_path, sizeof csv_path);
  if (ws != HOMOG_OK) {
    std::fprintf(stderr, "error: %s\n", homog_last_error());
    homog_run_free(run);
    return 3;
  }
  if (!a.quiet) std::printf("wrote %s\n", csv_path);
  const int code = homog_run_exit_code(run);
  if (!a.quiet)
    std::printf("%s\n", code == 0 ? "PASS" : (code == 2 ? "FAIL" : "ERROR"));
  homog_run_free(run);
  return code;
}

int runRefit(const std::string& csv, bool quiet) {
  homog_run* run = nullptr;
  if (homog_refit_file(csv.c_str(), &run) != HOMOG_OK) {
    std::fprintf(stderr, "error: %s\n", homog_last_error());
    return 3;
  }
  printReport(run, quiet);
  homog_run_free(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic homogenization laboratory"};
  app.set_version_flag("--version", std::string(homog_version()));
  app.require_subcommand(1);

  Args a;
  std::string report_csv;

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "experiment config (json)");
    sub->add_option("--out", a.out, "output directory, or a .csv artifact path");
    sub->add_option("--jobs", a.jobs, "worker threads (default HOMOG_JOBS or 1)");
    sub->add_option("--seed", a.seed, "seed for generated test data");
    sub->add_flag("--quiet", a.quiet, "suppress the criterion summary");
  };

  CLI::App* cell = app.add_subcommand("cell", "periodic cell solve and checks");
  addCommon(cell);
  cell->add_option("--problem", a.problem, "shipped family name instead of a config");
  cell->add_option("--cell-resolution", a.cell_resolution, "cells per lattice period");

  CLI::App* torus = app.add_subcommand("torus-sweep", "whole-space sweep on a torus");
  addCommon(torus);
  torus->add_option("--problem", a.problem, "shipped family name instead of a config");
  torus->add_option("--eps", a.eps, "comma list, entries like 1/8");
  torus->add_option("--variant", a.variant, "steklov | fourier | plain");
  torus->add_option("--cell-resolution", a.cell_resolution, "cells per lattice period");

  CLI::App* diri = app.add_subcommand("dirichlet-sweep", "bounded-domain sweep");
  addCommon(diri);
  diri->add_option("--problem", a.problem, "shipped family name instead of a config");
  diri->add_option("--eps", a.eps, "comma list, entries like 1/8");
  diri->add_option("--path", a.path, "general | bounded-lambda");
  diri->add_option("--dump-fields", a.dump_fields, "directory for per-eps field rasters");
  diri->add_option("--cell-resolution", a.cell_resolution, "cells per lattice period");

  CLI::App* diag = app.add_subcommand("diagnostics", "property suites on the shipped set");
  addCommon(diag);
  diag->add_option("--families", a.families, "comma list of family names");

  CLI::App* report = app.add_subcommand("report", "refit an existing sweep csv");
  report->add_option("csv", report_csv, "sweep csv path")->required();
  report->add_flag("--quiet", a.quiet, "suppress the fit summary");

  CLI11_PARSE(app, argc, argv);

  if (cell->parsed()) return runExperiment("cell", a);
  if (torus->parsed()) return runExperiment("torus-sweep", a);
  if (diri->parsed()) return runExperiment("dirichlet-sweep", a);
  if (diag->parsed()) return runExperiment("diagnostics", a);
  if (report->parsed()) return runRefit(report_csv, a.quiet);
  return 3;
}
