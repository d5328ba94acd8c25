#include "homog/homog.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "core/harness.hpp"

namespace {

thread_local std::string t_error;

homog_status fail(homog_status s, const std::string& msg) {
  t_error = msg;
  return s;
}

// every entry point funnels its exceptions through here; the library must
// never let one cross the C boundary
homog_status mapException() {
  try {
    throw;
  } catch (const nlohmann::json::exception& e) {
    return fail(HOMOG_ERR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(HOMOG_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(HOMOG_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(HOMOG_ERR_RUNTIME, "unknown error");
  }
}

std::string slurp(const char* path, bool* ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *ok = false;
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  *ok = true;
  return ss.str();
}

}  // namespace

struct homog_run {
  homog::harness::ExperimentConfig cfg;
  homog::harness::ConvergenceReport rep;
  std::string csv, report;
};

namespace {

homog_status runFromJson(const std::string& text, const char* overrides,
                         homog_run** out) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (overrides && *overrides) {
    nlohmann::json ov = nlohmann::json::parse(overrides);
    if (!ov.is_object()) throw std::invalid_argument("overrides must be a json object");
    if (!j.is_object()) throw std::invalid_argument("config must be a json object");
    nlohmann::json& ex = j.contains("experiment") ? j.at("experiment") : j;
    for (auto& [k, v] : ov.items()) ex[k] = v;
  }
  auto run = std::make_unique<homog_run>();
  run->cfg = homog::harness::configFromJson(j);
  run->rep = homog::harness::run(run->cfg);
  run->csv = homog::harness::csvText(run->rep);
  run->report = homog::harness::reportJsonText(run->rep, run->cfg);
  *out = run.release();
  return HOMOG_OK;
}

}  // namespace

extern "C" {

const char* homog_version(void) { return "1.0.0"; }

const char* homog_last_error(void) { return t_error.c_str(); }

homog_status homog_run_text(const char* config_json, const char* overrides,
                            homog_run** out) {
  if (!config_json || !out) return fail(HOMOG_ERR_INVALID, "null argument");
  *out = nullptr;
  try {
    return runFromJson(config_json, overrides, out);
  } catch (...) {
    return mapException();
  }
}

homog_status homog_run_file(const char* config_path, const char* overrides,
                            homog_run** out) {
  if (!config_path || !out) return fail(HOMOG_ERR_INVALID, "null argument");
  *out = nullptr;
  bool ok = false;
  const std::string text = slurp(config_path, &ok);
  if (!ok) return fail(HOMOG_ERR_IO, std::string("cannot open ") + config_path);
  try {
    return runFromJson(text, overrides, out);
  } catch (...) {
    return mapException();
  }
}

homog_status homog_refit_text(const char* csv_text, homog_run** out) {
  if (!csv_text || !out) return fail(HOMOG_ERR_INVALID, "null argument");
  *out = nullptr;
  try {
    auto run = std::make_unique<homog_run>();
    run->cfg.kind = homog::harness::ExperimentKind::Diagnostics;
    run->cfg.name = "refit";
    run->rep = homog::harness::refitCsv(csv_text);
    run->csv = homog::harness::csvText(run->rep);
    run->report = homog::harness::reportJsonText(run->rep, run->cfg);
    *out = run.release();
    return HOMOG_OK;
  } catch (...) {
    return mapException();
  }
}

homog_status homog_refit_file(const char* csv_path, homog_run** out) {
  if (!csv_path || !out) return fail(HOMOG_ERR_INVALID, "null argument");
  *out = nullptr;
  bool ok = false;
  const std::string text = slurp(csv_path, &ok);
  if (!ok) return fail(HOMOG_ERR_IO, std::string("cannot open ") + csv_path);
  return homog_refit_text(text.c_str(), out);
}

void homog_run_free(homog_run* run) { delete run; }

int homog_run_ok(const homog_run* run) { return run && run->rep.ok ? 1 : 0; }

int homog_run_pass(const homog_run* run) { return run && run->rep.pass ? 1 : 0; }

int homog_run_exit_code(const homog_run* run) {
  return run ? homog::harness::exitCode(run->rep) : 3;
}

const char* homog_run_error(const homog_run* run) {
  return run ? run->rep.error.c_str() : "null run";
}

const char* homog_run_csv(const homog_run* run) {
  return run ? run->csv.c_str() : "";
}

const char* homog_run_report_json(const homog_run* run) {
  return run ? run->report.c_str() : "";
}

homog_status homog_run_write(const homog_run* run, const char* out_dir,
                             char* csv_path, size_t cap) {
  if (!run || !out_dir) return fail(HOMOG_ERR_INVALID, "null argument");
  try {
    const std::string path =
        homog::harness::writeArtifacts(run->rep, run->cfg, out_dir);
    if (csv_path && cap > 0) {
      std::strncpy(csv_path, path.c_str(), cap - 1);
      csv_path[cap - 1] = '\0';
    }
    return HOMOG_OK;
  } catch (const std::exception& e) {
    return fail(HOMOG_ERR_IO, e.what());
  }
}

homog_status homog_fit_rate(const double* eps, const double* err, long n,
                            double* slope, double* half_width, int* has_slope,
                            int* floor_limited) {
  if (!eps || !err || n < 0) return fail(HOMOG_ERR_INVALID, "null argument");
  try {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n);
    for (long i = 0; i < n; ++i) pairs.push_back({eps[i], err[i]});
    const homog::harness::RateFit f = homog::harness::fitRate(pairs);
    if (slope) *slope = f.slope;
    if (half_width) *half_width = f.has_interval ? f.half_width : 0.0;
    if (has_slope) *has_slope = f.has_slope ? 1 : 0;
    if (floor_limited) *floor_limited = f.floor_limited ? 1 : 0;
    return HOMOG_OK;
  } catch (...) {
    return mapException();
  }
}

}  // extern "C"
