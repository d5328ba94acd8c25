#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/harness.hpp"
#include "core/smoothing.hpp"

using namespace homog;
using harness::ConvergenceReport;
using harness::ExperimentConfig;
using harness::ExperimentKind;
using harness::RateFit;
using nlohmann::json;

namespace {

using Pairs = std::vector<std::pair<double, double>>;

const RateFit* findFit(const ConvergenceReport& rep, const std::string& name) {
  for (const auto& [n, fit] : rep.fits)
    if (n == name) return &fit;
  return nullptr;
}

}  // namespace

TEST_CASE("log-log fit recovers exact power laws") {
  Pairs half, lin;
  for (double e : {0.125, 0.0625, 0.03125, 0.015625}) {
    half.push_back({e, 2.0 * std::sqrt(e)});
    lin.push_back({e, 0.7 * e});
  }
  const RateFit a = harness::fitRate(half);
  REQUIRE(a.has_slope);
  CHECK(a.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.half_width < 1e-10);
  CHECK_FALSE(a.floor_limited);

  const RateFit b = harness::fitRate(lin);
  CHECK(b.slope == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit edge cases") {
  CHECK_THROWS_AS(harness::fitRate(Pairs{{0.5, 1.0}, {0.25, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(harness::fitRate(Pairs{{0.5, 1}, {-0.25, 1}, {0.1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harness::fitRate(Pairs{{0.5, 1}, {0.25, -1}, {0.1, 1}}),
                  std::invalid_argument);

  // everything at the floor: no slope, flagged
  const RateFit f = harness::fitRate(Pairs{{0.25, 1e-15}, {0.125, 2e-15}, {0.0625, 5e-16}});
  CHECK_FALSE(f.has_slope);
  CHECK(f.floor_limited);
  CHECK(f.floor_rows.size() == 3);

  // one floor row drops out, slope comes from the clean rows
  const RateFit g = harness::fitRate(
      Pairs{{0.25, 0.05}, {0.125, 0.025}, {0.0625, 0.0125}, {0.03125, 1e-14}});
  REQUIRE(g.has_slope);
  CHECK(g.floor_limited);
  CHECK(g.floor_rows.size() == 1);
  CHECK(g.floor_rows[0] == 3);
  CHECK(g.slope == doctest::Approx(1.0).epsilon(1e-12));

  // a residual can never exceed three rms on four points, so no outlier refit
  const RateFit h = harness::fitRate(
      Pairs{{0.25, 0.1}, {0.125, 0.09}, {0.0625, 0.025}, {0.03125, 0.0125}});
  CHECK(h.flagged_rows.empty());
}

TEST_CASE("seeded samples are reproducible and band-limited") {
  const fem::Grid g = fem::Grid::torus(1, {64, 1, 1}, {1.0, 1.0, 1.0});
  const fem::Field a = harness::randomBandLimited(g, 1, 3, 42);
  const fem::Field b = harness::randomBandLimited(g, 1, 3, 42);
  const fem::Field c = harness::randomBandLimited(g, 1, 3, 43);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
  CHECK(fem::normL2(a) == doctest::Approx(1.0).epsilon(1e-12));

  // modes up to 3 pass the cutoff at eps = 1/8 untouched
  const model::Lattice lat = model::Lattice::cubic(1);
  fem::Field p = fem::fourierProject(a, lat, 0.125);
  double worst = 0;
  for (size_t i = 0; i < p.data.size(); ++i)
    worst = std::max(worst, std::abs(p.data[i] - a.data[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("bump samples vanish on the boundary") {
  const fem::Grid g = unitBox(2, 32);
  const fem::Field u = harness::randomBump(g, 3, 7);
  CHECK(fem::normL2(u) == doctest::Approx(1.0).epsilon(1e-12));
  const long nn = g.nodesAxis(0);
  for (long i = 0; i < nn; ++i) {
    CHECK(u.at(i, 0) == 0.0);                  // bottom row
    CHECK(u.at((nn - 1) * nn + i, 0) == 0.0);  // top row
    CHECK(u.at(i * nn, 0) == 0.0);             // left column
  }
}

TEST_CASE("shipped families") {
  const auto fams = harness::shippedFamilies();
  REQUIRE(fams.size() == 5);
  std::set<std::string> names;
  for (const auto& f : fams) names.insert(f.name);
  CHECK(names.count("d1-trig") == 1);
  CHECK(names.count("d2-laminate") == 1);
  CHECK(names.count("d2-checkerboard") == 1);
  CHECK(names.count("d2-constant") == 1);
  CHECK(names.count("d2-elasticity") == 1);
  for (const auto& f : fams) {
    CHECK(f.cell_resolution >= 16);
    if (f.name == "d2-constant")
      CHECK_FALSE(f.oscillatory);
    else
      CHECK(f.oscillatory);
  }
}

TEST_CASE("config parsing") {
  json j;
  j["kind"] = "torus-sweep";
  j["problem"] = "d1-trig";
  j["eps"] = {"1/8", "1/16"};
  const ExperimentConfig cfg = harness::configFromJson(j);
  CHECK(cfg.kind == ExperimentKind::TorusSweep);
  REQUIRE(cfg.eps.size() == 2);
  CHECK(cfg.eps[0] == 0.125);
  CHECK(cfg.eps[1] == 0.0625);
  CHECK(cfg.cell_resolution == 1024);  // family default
  CHECK(cfg.seed == 1);

  json bad = j;
  bad["eps"] = {"1/16", "1/8"};  // must decrease
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
  bad = j;
  bad["eps"] = {0.3};
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
  bad = j;
  bad["kind"] = "mystery";
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
  bad = j;
  bad["problem"] = "no-such-family";
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
  bad = j;
  bad["grid_per_eps"] = 8;
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
  bad = j;
  bad["variant"] = "wavelet";
  CHECK_THROWS_AS(harness::configFromJson(bad), std::invalid_argument);
}

TEST_CASE("csv serialization is exact") {
  ConvergenceReport rep;
  rep.columns = {"eps", "l2_err"};
  rep.rows = {{0.125, 1.0 / 3.0}, {0.0625, 0.1}};
  const std::string text = harness::csvText(rep);
  CHECK(text ==
        "eps,l2_err\n"
        "0.125,0.33333333333333331\n"
        "0.0625,0.10000000000000001\n");
}

TEST_CASE("runs are deterministic across repeats and worker counts") {
  json j;
  j["kind"] = "torus-sweep";
  j["problem"] = "d1-trig";
  j["cell_resolution"] = 128;
  j["eps"] = {"1/8", "1/16"};
  ExperimentConfig cfg = harness::configFromJson(j);
  cfg.jobs = 1;

  const ConvergenceReport r1 = harness::run(cfg);
  REQUIRE(r1.ok);
  const ConvergenceReport r2 = harness::run(cfg);
  cfg.jobs = 2;
  const ConvergenceReport r3 = harness::run(cfg);

  CHECK(harness::csvText(r1) == harness::csvText(r2));
  CHECK(harness::csvText(r1) == harness::csvText(r3));
  CHECK(harness::reportJsonText(r1, cfg) == harness::reportJsonText(r2, cfg));

  // row order is the eps order regardless of which worker finished first
  REQUIRE(r1.rows.size() == 2);
  CHECK(r1.rows[0][0] == 0.125);
  CHECK(r1.rows[1][0] == 0.0625);
}

TEST_CASE("report json carries fits and criteria") {
  json j;
  j["kind"] = "cell";
  j["problem"] = "d1-trig";
  j["cell_resolution"] = 256;
  const ExperimentConfig cfg = harness::configFromJson(j);
  const ConvergenceReport rep = harness::run(cfg);
  REQUIRE(rep.ok);
  CHECK(rep.pass);
  CHECK(harness::exitCode(rep) == 0);

  const json out = json::parse(harness::reportJsonText(rep, cfg));
  CHECK(out.at("kind") == "cell");
  CHECK(out.at("ok") == true);
  CHECK(out.at("pass") == true);
  CHECK(out.at("criteria").is_array());
  CHECK(out.at("rows").is_array());
  CHECK(out.at("config").at("cell_resolution") == 256);
  bool found = false;
  for (const auto& c : out.at("criteria"))
    if (c.at("name") == "loewner-margins") {
      found = true;
      CHECK(c.at("pass") == true);
    }
  CHECK(found);
}

TEST_CASE("a failing run reports instead of throwing") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::TorusSweep;
  cfg.name = "d1-trig";
  for (const auto& f : harness::shippedFamilies())
    if (f.name == cfg.name) cfg.problem = f.problem;
  cfg.cell_resolution = 64;
  cfg.eps = {0.11};  // not a power of two: rejected inside the run
  cfg.grid_per_eps = 16;
  const ConvergenceReport rep = harness::run(cfg);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.error.empty());
  CHECK(harness::exitCode(rep) == 3);
}

TEST_CASE("refit recomputes slopes from csv text") {
  ConvergenceReport rep;
  rep.kind = ExperimentKind::TorusSweep;
  rep.columns = {"eps", "l2_err", "h1_corr_err"};
  for (double e : {0.25, 0.125, 0.0625})
    rep.rows.push_back({e, 2.0 * e * e, 0.5 * e});
  const std::string csv = harness::csvText(rep);
  const ConvergenceReport back = harness::refitCsv(csv);
  const RateFit* l2 = findFit(back, "l2_err");
  const RateFit* h1 = findFit(back, "h1_corr_err");
  REQUIRE(l2 != nullptr);
  REQUIRE(h1 != nullptr);
  CHECK(l2->slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h1->slope == doctest::Approx(1.0).epsilon(1e-12));
}
