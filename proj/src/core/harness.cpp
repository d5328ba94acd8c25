#include "core/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "core/extension.hpp"
#include "core/norms.hpp"
#include "core/operators.hpp"
#include "core/raster.hpp"
#include "core/smoothing.hpp"

namespace homog::harness {

using fem::Field;
using fem::Grid;
using nlohmann::json;

namespace {

constexpr double kErrorFloor = 1e-13;

// two-sided 97.5 percent t quantiles; beyond the table the normal value is
// close enough for a report interval
double tQuantile(long df) {
  static const double q[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                             2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                             2.131,  2.120, 2.110, 2.101, 2.093, 2.086};
  if (df < 1) return 0;
  if (df <= 20) return q[df - 1];
  if (df <= 30) return 2.042;
  return 1.960;
}

void olsLogLog(const std::vector<std::pair<double, double>>& pairs,
               const std::vector<long>& idx, double* slope, double* icpt,
               double* sxx, double* ssr) {
  const long n = static_cast<long>(idx.size());
  double mx = 0, my = 0;
  for (long i : idx) {
    mx += std::log(pairs[i].first);
    my += std::log(pairs[i].second);
  }
  mx /= n;
  my /= n;
  double vxx = 0, vxy = 0;
  for (long i : idx) {
    const double dx = std::log(pairs[i].first) - mx;
    const double dy = std::log(pairs[i].second) - my;
    vxx += dx * dx;
    vxy += dx * dy;
  }
  *slope = vxy / vxx;
  *icpt = my - *slope * mx;
  *sxx = vxx;
  double acc = 0;
  for (long i : idx) {
    const double r = std::log(pairs[i].second) -
                     (*icpt + *slope * std::log(pairs[i].first));
    acc += r * r;
  }
  *ssr = acc;
}

}  // namespace

RateFit fitRate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("rate fit needs at least 3 rows");
  RateFit out;
  std::vector<long> used;
  for (long i = 0; i < static_cast<long>(pairs.size()); ++i) {
    if (!(pairs[i].first > 0)) throw std::invalid_argument("rate fit needs positive eps");
    if (pairs[i].second < 0) throw std::invalid_argument("rate fit needs nonnegative errors");
    if (pairs[i].second <= kErrorFloor) {
      out.floor_rows.push_back(i);
      out.floor_limited = true;
    } else {
      used.push_back(i);
    }
  }
  if (used.size() < 2) return out;  // floor limited, no usable trend

  double slope = 0, icpt = 0, sxx = 0, ssr = 0;
  olsLogLog(pairs, used, &slope, &icpt, &sxx, &ssr);

  if (used.size() >= 3) {
    const double rms = std::sqrt(ssr / used.size());
    std::vector<long> kept;
    for (long i : used) {
      const double r = std::log(pairs[i].second) - (icpt + slope * std::log(pairs[i].first));
      if (rms > 0 && std::abs(r) > 3.0 * rms)
        out.flagged_rows.push_back(i);
      else
        kept.push_back(i);
    }
    if (!out.flagged_rows.empty() && kept.size() >= 2) {
      used = kept;
      olsLogLog(pairs, used, &slope, &icpt, &sxx, &ssr);
    }
  }

  out.has_slope = true;
  out.slope = slope;
  out.intercept = icpt;
  const long df = static_cast<long>(used.size()) - 2;
  if (df >= 1 && sxx > 0) {
    out.has_interval = true;
    out.half_width = tQuantile(df) * std::sqrt(ssr / df / sxx);
  }
  return out;
}

Field randomBandLimited(const Grid& grid, int ncomp, int max_mode, std::uint64_t seed) {
  if (max_mode < 0) throw std::invalid_argument("band limit must be nonnegative");
  const int d = grid.dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

  struct Mode {
    double w[3];
    double a, p;
  };
  const long K = max_mode;
  long nmodes = 1;
  for (int j = 0; j < d; ++j) nmodes *= 2 * K + 1;

  Field f(grid, ncomp);
  const long nodes = grid.nodeCount();
  std::vector<Mode> modes(nmodes);
  std::vector<double> coord[3];
  for (int j = 0; j < d; ++j) {
    coord[j].resize(grid.nodesAxis(j));
    for (long i = 0; i < grid.nodesAxis(j); ++i) coord[j][i] = grid.nodeCoord(j, i);
  }
  const long n1 = d > 1 ? grid.nodesAxis(1) : 1;
  const long n2 = d > 2 ? grid.nodesAxis(2) : 1;

  for (int c = 0; c < ncomp; ++c) {
    long t = 0;
    long k[3] = {-K, -K, -K};
    for (long m = 0; m < nmodes; ++m, ++t) {
      for (int j = 0; j < d; ++j)
        modes[t].w[j] = 2.0 * M_PI * k[j] / grid.extent(j);
      modes[t].a = amp(rng);
      modes[t].p = phase(rng);
      for (int j = d - 1; j >= 0; --j) {
        if (++k[j] <= K) break;
        k[j] = -K;
      }
    }
    for (long i0 = 0; i0 < grid.nodesAxis(0); ++i0)
      for (long i1 = 0; i1 < n1; ++i1)
        for (long i2 = 0; i2 < n2; ++i2) {
          const double x0 = coord[0][i0];
          const double x1 = d > 1 ? coord[1][i1] : 0;
          const double x2 = d > 2 ? coord[2][i2] : 0;
          double v = 0;
          for (const Mode& mo : modes)
            v += mo.a * std::cos(mo.w[0] * x0 + mo.w[1] * x1 + mo.w[2] * x2 + mo.p);
          f.at((i0 * n1 + i1) * n2 + i2, c) = v;
        }
  }
  const double nrm = fem::normL2(f);
  if (nrm > 0)
    for (double& v : f.data) v /= nrm;
  return f;
}

Field randomBump(const Grid& grid, int max_mode, std::uint64_t seed) {
  Field f = randomBandLimited(grid, 1, max_mode, seed);
  const int d = grid.dim;
  const double margin = 0.15;
  const long n1 = d > 1 ? grid.nodesAxis(1) : 1;
  const long n2 = d > 2 ? grid.nodesAxis(2) : 1;
  for (long i0 = 0; i0 < grid.nodesAxis(0); ++i0)
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        const long idx[3] = {i0, i1, i2};
        double b = 1;
        for (int j = 0; j < d; ++j) {
          const double t = (grid.nodeCoord(j, idx[j]) - grid.origin[j]) / grid.extent(j);
          b *= (1.0 - fem::quinticRamp(t / margin)) *
               (1.0 - fem::quinticRamp((1.0 - t) / margin));
        }
        f.at((i0 * n1 + i1) * n2 + i2, 0) *= b;
      }
  const double nrm = fem::normL2(f);
  if (nrm > 0)
    for (double& v : f.data) v /= nrm;
  return f;
}

std::vector<NamedProblem> shippedFamilies() {
  auto mk = [](const char* name, model::Lattice lat, model::Symbol sym,
               model::Coefficient coef, bool osc, long res) {
    NamedProblem np;
    np.name = name;
    np.problem.lattice = std::move(lat);
    np.problem.symbol = sym;
    np.problem.coefficient = std::move(coef);
    np.problem.bounds = sym.ellipticityBounds();
    np.oscillatory = osc;
    np.cell_resolution = res;
    return np;
  };

  Vec amps(1);
  amps << 1.0;
  Mat aniso(2, 2);
  aniso << 2.0, 0.5, 0.5, 3.0;
  auto modulation = std::make_shared<model::Coefficient>(
      model::Coefficient::laminate(2, 1, 1.0, 2.0, 0.5));

  std::vector<NamedProblem> fams;
  fams.push_back(mk("d1-trig", model::Lattice::cubic(1), model::Symbol::gradient(1),
                    model::Coefficient::trig(1, 1, 2.0, amps), true, 1024));
  fams.push_back(mk("d2-laminate", model::Lattice::cubic(2), model::Symbol::gradient(2),
                    model::Coefficient::laminate(2, 1, 1.0, 4.0, 0.5), true, 512));
  fams.push_back(mk("d2-checkerboard", model::Lattice::cubic(2),
                    model::Symbol::gradient(2), model::Coefficient::checkerboard(1, 1.0, 4.0),
                    true, 512));
  fams.push_back(mk("d2-constant", model::Lattice::cubic(2), model::Symbol::gradient(2),
                    model::Coefficient::constant(2, aniso), false, 64));
  fams.push_back(mk("d2-elasticity", model::Lattice::cubic(2),
                    model::Symbol::elasticity2d(),
                    model::Coefficient::elasticity(1.0, 1.0, modulation), true, 128));
  return fams;
}

namespace {

const char* kindName(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Cell: return "cell";
    case ExperimentKind::TorusSweep: return "torus-sweep";
    case ExperimentKind::DirichletSweep: return "dirichlet-sweep";
    case ExperimentKind::Diagnostics: return "diagnostics";
  }
  return "unknown";
}

const char* variantName(CorrectorVariant v) {
  switch (v) {
    case CorrectorVariant::Fourier: return "fourier";
    case CorrectorVariant::Steklov: return "steklov";
    case CorrectorVariant::NoSmoothing: return "plain";
  }
  return "unknown";
}

double parseEpsEntry(const json& e) {
  if (e.is_string()) {
    const std::string s = e.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  }
  return e.get<double>();
}

void validateEps(const std::vector<double>& eps) {
  if (eps.empty()) throw std::invalid_argument("sweep needs a nonempty eps list");
  double prev = 1.0;
  for (double e : eps) {
    if (!(e > 0) || e > 0.5) throw std::invalid_argument("eps must lie in (0, 1/2]");
    const double l = std::log2(1.0 / e);
    if (std::abs(l - std::round(l)) > 1e-9)
      throw std::invalid_argument("eps values must be negative powers of two");
    if (!(e < prev)) throw std::invalid_argument("eps list must be strictly decreasing");
    prev = e;
  }
}

void validateConfig(const ExperimentConfig& cfg) {
  if (cfg.kind == ExperimentKind::TorusSweep || cfg.kind == ExperimentKind::DirichletSweep)
    validateEps(cfg.eps);
  if (cfg.grid_per_eps < 16)
    throw std::invalid_argument("comparison grids need at least 16 cells per eps");
  if (cfg.cell_resolution < 2) throw std::invalid_argument("cell resolution too small");
  if (cfg.jobs < 1) throw std::invalid_argument("worker count must be positive");
}

// pulls independent tasks off a shared counter; first failure wins and the
// remaining tasks are dropped
template <class Fn>
void runTasks(int jobs, long n, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::mutex mx;
  std::exception_ptr err;
  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mx);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nt = static_cast<int>(std::min<long>(jobs, n));
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

json matrixJson(const Mat& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json fitJson(const RateFit& f) {
  json j;
  j["has_slope"] = f.has_slope;
  if (f.has_slope) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
  }
  j["has_interval"] = f.has_interval;
  if (f.has_interval) j["half_width"] = f.half_width;
  j["floor_limited"] = f.floor_limited;
  j["floor_rows"] = f.floor_rows;
  j["preasymptotic_rows"] = f.flagged_rows;
  return j;
}

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void addCriterion(ConvergenceReport& rep, const std::string& name, bool pass,
                  const std::string& detail) {
  rep.criteria.push_back({name, pass, detail});
}

// slope criterion that degrades gracefully when the series sits at the floor
void slopeCriterion(ConvergenceReport& rep, const std::string& name, const RateFit& f,
                    double lo, double hi = 1e30) {
  if (!f.has_slope) {
    addCriterion(rep, name, f.floor_limited, f.floor_limited ? "floor limited" : "no fit");
    return;
  }
  const bool pass = f.slope >= lo && f.slope <= hi;
  std::string detail = "slope " + num(f.slope);
  if (f.has_interval) detail += " +- " + num(f.half_width);
  detail += hi < 1e29 ? " vs [" + num(lo) + ", " + num(hi) + "]" : " vs >= " + num(lo);
  addCriterion(rep, name, pass, detail);
}

std::uint64_t caseSeed(std::uint64_t base, std::uint64_t group, std::uint64_t idx) {
  return base * 1000003ull + group * 8191ull + idx;
}

// ---------------------------------------------------------------------------

void runCell(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const CellSolution sol = solveCell(cfg.problem, cfg.cell_resolution, cfg.solve);
  const CellChecks ch = cellChecks(sol, cfg.problem);
  const model::Constants K = cfg.problem.constants();

  rep.columns = {"resolution",   "skew",          "corrector_l2", "corrector_grad_l2",
                 "margin_lower", "margin_upper",  "norm_margin",  "inv_norm_margin",
                 "mean_flux_defect", "iterations", "residual"};
  std::vector<double> row = {static_cast<double>(sol.resolution),
                             sol.skew,
                             sol.corrector_l2,
                             sol.corrector_grad_l2,
                             ch.margin_lower,
                             ch.margin_upper,
                             ch.norm_margin,
                             ch.inv_norm_margin,
                             ch.mean_flux_defect,
                             static_cast<double>(sol.iterations),
                             sol.residual};
  for (int r = 0; r < sol.m; ++r)
    for (int c = 0; c < sol.m; ++c) {
      rep.columns.push_back("g_eff_" + std::to_string(r) + std::to_string(c));
      row.push_back(sol.g_eff(r, c));
    }
  rep.rows.push_back(std::move(row));

  const double mtol = 1e-8 * K.g_sup;
  addCriterion(rep, "loewner-margins",
               ch.margin_lower >= -mtol && ch.margin_upper >= -mtol,
               "lower " + num(ch.margin_lower) + ", upper " + num(ch.margin_upper) +
                   " vs >= " + num(-mtol));
  addCriterion(rep, "norm-bounds",
               ch.norm_margin >= -1e-8 * K.g_sup && ch.inv_norm_margin >= -1e-8 * K.ginv_sup,
               "norm " + num(ch.norm_margin) + ", inverse " + num(ch.inv_norm_margin));
  addCriterion(rep, "corrector-norm-bounds",
               sol.corrector_l2 <= K.corrector_l2_bound * (1 + 1e-9) &&
                   sol.corrector_grad_l2 <= K.corrector_grad_l2_bound * (1 + 1e-9),
               num(sol.corrector_l2) + " vs " + num(K.corrector_l2_bound) + "; " +
                   num(sol.corrector_grad_l2) + " vs " + num(K.corrector_grad_l2_bound));
  addCriterion(rep, "flux-mean",
               ch.mean_flux_defect <= 1e-10 * std::max(1.0, K.g_sup),
               num(ch.mean_flux_defect) + " vs " + num(1e-10 * std::max(1.0, K.g_sup)));

  // per-column cell means of the corrector; the solver projects these out
  double worst_mean = 0;
  for (int c = 0; c < sol.corrector.ncomp; ++c) {
    double acc = 0;
    for (long i = 0; i < sol.corrector.nodes(); ++i) acc += sol.corrector.at(i, c);
    worst_mean = std::max(worst_mean, std::abs(acc / sol.corrector.nodes()));
  }
  addCriterion(rep, "zero-mean", worst_mean <= 1e-10, num(worst_mean) + " vs 1e-10");

  bool degen = true;
  std::string ddetail;
  if (ch.corrector_vanishes) {
    degen = degen && (ch.g_bar - sol.g_eff).norm() <= 1e-6 * std::max(1.0, K.g_sup);
    ddetail += "matches arithmetic mean to " + num((ch.g_bar - sol.g_eff).norm());
  }
  if (ch.square_symbol) {
    degen = degen && (ch.g_under - sol.g_eff).norm() <= 1e-6 * std::max(1.0, K.g_sup);
    if (!ddetail.empty()) ddetail += "; ";
    ddetail += "matches harmonic mean to " + num((ch.g_under - sol.g_eff).norm());
  }
  if (ddetail.empty()) ddetail = "no degenerate case";
  addCriterion(rep, "degenerate-cases", degen, ddetail);

  rep.extra["g_eff"] = matrixJson(sol.g_eff);
  rep.extra["g_bar"] = matrixJson(ch.g_bar);
  rep.extra["g_under"] = matrixJson(ch.g_under);
  rep.extra["corrector_vanishes"] = ch.corrector_vanishes;
  rep.extra["square_symbol"] = ch.square_symbol;
  rep.extra["min_eig"] = ch.min_eig;

  rep.fingerprint["cell_resolution"] = sol.resolution;
  rep.fingerprint["iterations"] = sol.iterations;
  rep.fingerprint["residual"] = sol.residual;
}

void runTorus(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const CellSolution sol = solveCell(cfg.problem, cfg.cell_resolution, cfg.solve);

  TorusSweepOptions opt;
  opt.extent = cfg.torus_extent;
  opt.variant = cfg.variant;
  opt.bounded_corrector = cfg.bounded_corrector;
  opt.grid_per_eps = cfg.grid_per_eps;
  opt.solve = cfg.solve;

  const long n = static_cast<long>(cfg.eps.size());
  std::vector<TorusRow> rows(n);
  runTasks(cfg.jobs, n, [&](long i) {
    rows[i] = torusSweep(cfg.problem, sol, {cfg.eps[i]}, opt).rows.at(0);
  });

  rep.columns = {"eps", "l2_err", "h1_corr_err", "ref_resolution", "cg_iters"};
  std::vector<std::pair<double, double>> l2, h1;
  json fp_rows = json::array();
  for (const TorusRow& r : rows) {
    rep.rows.push_back({r.eps, r.l2_err, r.h1_corr_err,
                        static_cast<double>(r.ref_resolution),
                        static_cast<double>(r.cg_iters)});
    l2.push_back({r.eps, r.l2_err});
    h1.push_back({r.eps, r.h1_corr_err});
    fp_rows.push_back({{"eps", r.eps},
                       {"ref_resolution", r.ref_resolution},
                       {"cg_iters", r.cg_iters}});
  }
  rep.fits.push_back({"l2", fitRate(l2)});
  rep.fits.push_back({"h1_corr", fitRate(h1)});
  slopeCriterion(rep, "l2-slope", rep.fits[0].second, 0.9);
  slopeCriterion(rep, "h1-corr-slope", rep.fits[1].second, 0.9);

  rep.fingerprint["cell_resolution"] = sol.resolution;
  rep.fingerprint["grid_per_eps"] = cfg.grid_per_eps;
  rep.fingerprint["torus_extent"] = cfg.torus_extent;
  rep.fingerprint["variant"] = variantName(cfg.variant);
  rep.fingerprint["rows"] = fp_rows;
}

void dumpStage(const ExperimentConfig& cfg, const DirichletStage& st, json& index) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.dump_fields);
  auto fieldRaster = [](const Field& f) {
    RasterData r;
    r.dim = f.grid.dim;
    r.rows = f.ncomp;
    r.cols = 1;
    for (int j = 0; j < r.dim; ++j) r.dims[j] = f.grid.nodesAxis(j);
    r.data = f.data;
    return r;
  };
  const std::string tag = "eps-" + num(st.row.eps, "%.10g") + "-";
  const std::pair<const char*, const Field*> fields[] = {
      {"u_eps", &st.u_rich}, {"u0", &st.u0},       {"v_eps", &st.v},
      {"flux", &st.smoothed}, {"phi_eps", &st.phi}, {"w_eps", &st.w}};
  json entry;
  entry["eps"] = st.row.eps;
  entry["resolution"] = st.row.resolution;
  json files = json::array();
  for (const auto& [role, f] : fields) {
    const std::string name = tag + role + ".raster";
    writeRaster((fs::path(cfg.dump_fields) / name).string(), fieldRaster(*f));
    files.push_back({{"file", name}, {"role", role}, {"components", f->ncomp}});
  }
  entry["files"] = files;
  index.push_back(entry);
}

void runDirichlet(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const CellSolution sol = solveCell(cfg.problem, cfg.cell_resolution, cfg.solve);
  const model::Constants K =
      cfg.problem.constants(std::sqrt(static_cast<double>(cfg.problem.dim())));

  DirichletOptions opt;
  opt.path = cfg.path;
  opt.bounded_corrector = cfg.bounded_corrector;
  opt.grid_per_eps = cfg.grid_per_eps;
  opt.flux_refine = cfg.flux_refine;
  opt.solve = cfg.solve;

  const long n = static_cast<long>(cfg.eps.size());
  std::vector<DirichletRow> rows(n);
  std::vector<json> dumps(n);
  runTasks(cfg.jobs, n, [&](long i) {
    DirichletStage st = dirichletStage(cfg.problem, sol, cfg.eps[i], opt);
    rows[i] = st.row;
    if (!cfg.dump_fields.empty()) {
      json idx = json::array();
      dumpStage(cfg, st, idx);
      dumps[i] = idx.at(0);
    }
  });
  if (!cfg.dump_fields.empty()) {
    json index = json::array();
    for (const json& j : dumps) index.push_back(j);
    std::ofstream out(std::filesystem::path(cfg.dump_fields) / "fields.json");
    out << json({{"stages", index}}).dump(2) << "\n";
  }

  rep.columns = {"eps",  "h1_corr_err", "l2_err", "flux_err", "phi_h1_over_sqrt_eps",
                 "w_h1", "gamma0_slack"};
  std::vector<std::pair<double, double>> h1, l2, flux, phi, wfit;
  json fp_rows = json::array();
  double worst_slack = 1e300;
  for (const DirichletRow& r : rows) {
    rep.rows.push_back({r.eps, r.h1_corr_err, r.l2_err, r.flux_err,
                        r.phi_h1_over_sqrt_eps, r.w_h1, r.gamma0_slack});
    h1.push_back({r.eps, r.h1_corr_err});
    l2.push_back({r.eps, r.l2_err});
    flux.push_back({r.eps, r.flux_err});
    phi.push_back({r.eps, r.phi_h1_over_sqrt_eps * std::sqrt(r.eps)});
    wfit.push_back({r.eps, r.w_h1});
    worst_slack = std::min(worst_slack, r.gamma0_slack);
    fp_rows.push_back({{"eps", r.eps},
                       {"resolution", r.resolution},
                       {"cg_iters", r.cg_iters},
                       {"richardson_order", r.richardson_order},
                       {"plain_h1_err", r.plain_h1_err},
                       {"h2_ratio", r.h2_ratio}});
  }
  rep.fits.push_back({"h1_corr", fitRate(h1)});
  rep.fits.push_back({"l2", fitRate(l2)});
  rep.fits.push_back({"flux", fitRate(flux)});
  rep.fits.push_back({"phi_h1", fitRate(phi)});
  rep.fits.push_back({"w_h1", fitRate(wfit)});

  slopeCriterion(rep, "h1-corr-slope", rep.fits[0].second, 0.4);
  slopeCriterion(rep, "l2-slope", rep.fits[1].second, 0.5);
  slopeCriterion(rep, "flux-slope", rep.fits[2].second, 0.4);
  slopeCriterion(rep, "phi-rate", rep.fits[3].second, 0.35, 0.65);
  addCriterion(rep, "discrepancy-bound", worst_slack >= -1e-8,
               "worst slack " + num(worst_slack) + " vs >= -1e-8");
  const DirichletRow& last = rows.back();
  addCriterion(rep, "corrector-helps",
               last.plain_h1_err >= 0.999 * last.h1_corr_err,
               "plain " + num(last.plain_h1_err) + " vs corrected " + num(last.h1_corr_err));

  rep.fingerprint["cell_resolution"] = sol.resolution;
  rep.fingerprint["grid_per_eps"] = cfg.grid_per_eps;
  rep.fingerprint["flux_refine"] = cfg.flux_refine;
  rep.fingerprint["path"] =
      cfg.path == DirichletPath::General ? "general" : "bounded-lambda";
  rep.fingerprint["gamma0"] = K.discrepancy_gain;
  rep.fingerprint["energy_bound"] = K.energy_bound;
  rep.fingerprint["rows"] = fp_rows;
}

void runDiagnostics(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  std::vector<NamedProblem> fams = shippedFamilies();
  if (!cfg.families.empty()) {
    std::vector<NamedProblem> picked;
    for (const std::string& want : cfg.families) {
      auto it = std::find_if(fams.begin(), fams.end(),
                             [&](const NamedProblem& f) { return f.name == want; });
      if (it == fams.end()) throw std::invalid_argument("unknown family: " + want);
      picked.push_back(*it);
    }
    fams = std::move(picked);
  }

  rep.columns = {"suite", "family", "case", "eps", "lhs", "rhs"};
  json names = json::array();
  for (const NamedProblem& f : fams) names.push_back(f.name);

  // suite 0: a-priori energy bound of the oscillatory Dirichlet solve, 20
  // seeded forcings per family; the bound holds at any resolution, so sizes
  // are picked for runtime
  long energy_viol = 0;
  for (size_t fi = 0; fi < fams.size(); ++fi) {
    const NamedProblem& fam = fams[fi];
    const int d = fam.problem.dim();
    const int nc = fam.problem.symbol.cols();
    const double eps = nc > 1 ? 0.25 : 0.125;
    const long N = d == 1 ? 256 : (nc > 1 ? 64 : 128);
    const Grid grid = unitBox(d, N);
    const model::Constants K = fam.problem.constants(std::sqrt(static_cast<double>(d)));
    fem::Operator A(grid, fam.problem.symbol, fam.problem.coefficient, eps, 0.0,
                    fem::BC::Dirichlet0);
    for (int t = 0; t < 20; ++t) {
      const Field F = randomBandLimited(grid, nc, 3, caseSeed(cfg.seed, fi, t));
      std::vector<double> rhs(F.data.size());
      A.massApply(F.data.data(), rhs.data());
      std::vector<double> x;
      fem::solve(A, rhs, x, cfg.solve);
      Field u(grid, nc);
      u.data = std::move(x);
      const double lhs = fem::normH1(u);
      const double bound = K.energy_bound * fem::normL2(F);
      if (lhs > bound * (1 + 1e-10)) ++energy_viol;
      rep.rows.push_back({0, static_cast<double>(fi), static_cast<double>(t), eps, lhs,
                          bound});
    }
  }
  addCriterion(rep, "energy-inequality", energy_viol == 0,
               energy_viol == 0 ? "no violations in 20 cases per family"
                                : num(energy_viol, "%.0f") + " violations");

  // suite 1: smoothing operator contracts on seeded band-limited samples,
  // d = 1 and d = 2, with the trig profile as multiplication weight
  long smooth_viol = 0;
  {
    const double eps = 0.125;
    for (int d = 1; d <= 2; ++d) {
      const long N = d == 1 ? 256 : 128;
      const Grid grid = Grid::torus(d, {N, N, N}, {1, 1, 1});
      const model::Lattice lat = model::Lattice::cubic(d);
      std::vector<Field> samples;
      for (int t = 0; t < 20; ++t)
        samples.push_back(randomBandLimited(grid, 1, 4, caseSeed(cfg.seed, 100 + d, t)));

      const model::Coefficient prof =
          model::Coefficient::trig(d, 1, 2.0, Vec::Ones(d) * (d == 1 ? 1.0 : 0.5));
      double mean_sq = 4.0;  // mean of (2 + sum_j a_j cos)^2 = 4 + sum a_j^2 / 2
      for (int j = 0; j < d; ++j) mean_sq += 0.5 * (d == 1 ? 1.0 : 0.25);
      auto profile = [&prof](const double* y) { return prof.scalarAt(y); };

      const fem::SmoothingSuite pi = fem::smoothingSuite(
          fem::SmoothKind::FourierProjection, samples, lat, eps, 1.0 / lat.r0(), profile,
          std::sqrt(mean_sq), 0.05);
      const fem::SmoothingSuite st = fem::smoothingSuite(
          fem::SmoothKind::Steklov, samples, lat, eps, lat.r1(), profile,
          std::sqrt(mean_sq), 0.05);
      smooth_viol += pi.violations + st.violations;
      int c = 0;
      for (const fem::SmoothingSuite* s : {&pi, &st}) {
        rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 0), eps,
                            s->worst_decay, 1.0});
        rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 1), eps,
                            s->worst_opnorm, 1.0});
        rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 2), eps,
                            s->worst_mult, 1.0});
        rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 3), eps,
                            s->worst_commute, 1e-10});
        rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 4), eps,
                            s->worst_linearity, 1e-13});
        if (c == 0)
          rep.rows.push_back({1, static_cast<double>(d), static_cast<double>(c * 8 + 5),
                              eps, s->worst_idem, 1e-13});
        ++c;
      }

      // closed-form multiplier spot checks for the pointwise sampler
      fem::SteklovSampler sampler(d, eps);
      double worst = 0;
      const double xis[2][3] = {{2 * M_PI, 0, 0}, {6 * M_PI, 2 * M_PI, 0}};
      for (const double* xi : xis) {
        const double fac = fem::SteklovSampler::planeWaveFactor(d, eps, xi);
        const double x0[3] = {0.3, 0.55, 0};
        double ph = 0;
        for (int j = 0; j < d; ++j) ph += xi[j] * x0[j];
        const double got = sampler.sample(
            [&](const double* y) {
              double a = 0;
              for (int j = 0; j < d; ++j) a += xi[j] * y[j];
              return std::cos(a);
            },
            x0);
        worst = std::max(worst, std::abs(got - fac * std::cos(ph)));
      }
      if (worst > 1e-10) ++smooth_viol;
      rep.rows.push_back({1, static_cast<double>(d), 97, eps, worst, 1e-10});

      // the low-pass filter must reject a cutoff at or past the grid Nyquist
      bool rejected = false;
      try {
        const Grid coarse = Grid::torus(d, {8, 8, 8}, {1, 1, 1});
        Field tiny(coarse, 1);
        tiny.data[0] = 1.0;
        fem::fourierProject(tiny, lat, eps);
      } catch (const std::invalid_argument&) {
        rejected = true;
      }
      if (!rejected) ++smooth_viol;
      rep.rows.push_back({1, static_cast<double>(d), 98, eps, rejected ? 0.0 : 1.0, 0.5});
    }
  }
  addCriterion(rep, "smoothing-contracts", smooth_viol == 0,
               smooth_viol == 0 ? "no violations" : num(smooth_viol, "%.0f") + " violations");

  // suite 2: corrector norm bounds and the weighted inequality on compactly
  // supported seeded tests, one refinement retry per pair
  long weighted_viol = 0;
  for (size_t fi = 0; fi < fams.size(); ++fi) {
    const NamedProblem& fam = fams[fi];
    if (!fam.oscillatory) continue;
    const int d = fam.problem.dim();
    const CellSolution sol = solveCell(fam.problem, fam.cell_resolution, cfg.solve);
    const model::Constants K = fam.problem.constants();
    const Grid box = unitBox(d, 512);
    std::vector<Field> tests;
    for (int t = 0; t < 5; ++t)
      tests.push_back(randomBump(box, 3, caseSeed(cfg.seed, 200 + fi, t)));
    const std::vector<double> eps_grid = {0.125, 0.0625, 0.03125};
    const LambdaDiagnostics diag = lambdaDiagnostics(sol, K, tests, eps_grid);
    weighted_viol += diag.violations;
    rep.rows.push_back({2, static_cast<double>(fi), 90, 0, diag.lambda_l2,
                        diag.lambda_l2_bound});
    rep.rows.push_back({2, static_cast<double>(fi), 91, 0, diag.dlambda_l2,
                        diag.dlambda_l2_bound});
    for (size_t ri = 0; ri < diag.rows.size(); ++ri)
      rep.rows.push_back({2, static_cast<double>(fi), static_cast<double>(ri),
                          diag.rows[ri].eps, diag.rows[ri].lhs, diag.rows[ri].rhs});
  }
  addCriterion(rep, "weighted-inequality", weighted_viol == 0,
               weighted_viol == 0 ? "no violations after refinement"
                                  : num(weighted_viol, "%.0f") + " violations");

  rep.fingerprint["families"] = names;
  rep.fingerprint["seed"] = cfg.seed;
}

}  // namespace

ConvergenceReport run(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.kind = cfg.kind;
  rep.name = cfg.name.empty() ? kindName(cfg.kind) : cfg.name;
  try {
    validateConfig(cfg);
    rep.fingerprint["seed"] = cfg.seed;
    rep.fingerprint["jobs"] = cfg.jobs;
    rep.fingerprint["solver_tol"] = cfg.solve.tol;
    switch (cfg.kind) {
      case ExperimentKind::Cell:
        runCell(cfg, rep);
        break;
      case ExperimentKind::TorusSweep:
        runTorus(cfg, rep);
        break;
      case ExperimentKind::DirichletSweep:
        runDirichlet(cfg, rep);
        break;
      case ExperimentKind::Diagnostics:
        runDiagnostics(cfg, rep);
        break;
    }
    rep.pass = true;
    for (const CriterionResult& c : rep.criteria) rep.pass = rep.pass && c.pass;
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.pass = false;
    rep.error = e.what();
  }
  return rep;
}

std::string csvText(const ConvergenceReport& rep) {
  std::string s;
  for (size_t c = 0; c < rep.columns.size(); ++c) {
    if (c) s += ',';
    s += rep.columns[c];
  }
  s += '\n';
  char buf[64];
  for (const std::vector<double>& row : rep.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) s += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      s += buf;
    }
    s += '\n';
  }
  return s;
}

std::string reportJsonText(const ConvergenceReport& rep, const ExperimentConfig& cfg) {
  json j;
  j["kind"] = kindName(rep.kind);
  j["name"] = rep.name;
  j["ok"] = rep.ok;
  j["pass"] = rep.pass;
  if (!rep.ok) j["error"] = rep.error;
  j["columns"] = rep.columns;
  j["rows"] = rep.rows;
  json fits;
  for (const auto& [name, fit] : rep.fits) fits[name] = fitJson(fit);
  j["fits"] = fits;
  json crit = json::array();
  for (const CriterionResult& c : rep.criteria)
    crit.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["criteria"] = crit;
  j["fingerprint"] = rep.fingerprint;
  if (!rep.extra.is_null()) j["extra"] = rep.extra;

  json conf;
  conf["kind"] = kindName(cfg.kind);
  conf["seed"] = cfg.seed;
  conf["jobs"] = cfg.jobs;
  conf["eps"] = cfg.eps;
  conf["cell_resolution"] = cfg.cell_resolution;
  conf["grid_per_eps"] = cfg.grid_per_eps;
  if (cfg.kind == ExperimentKind::TorusSweep) {
    conf["variant"] = variantName(cfg.variant);
    conf["extent"] = cfg.torus_extent;
  }
  if (cfg.kind == ExperimentKind::DirichletSweep) {
    conf["path"] = cfg.path == DirichletPath::General ? "general" : "bounded-lambda";
    conf["flux_refine"] = cfg.flux_refine;
  }
  if (!cfg.problem_json.is_null()) conf["problem"] = cfg.problem_json;
  j["config"] = conf;
  return j.dump(2) + "\n";
}

std::string writeArtifacts(const ConvergenceReport& rep, const ExperimentConfig& cfg,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir.empty() ? "." : out_dir);
  const std::string base = kindName(cfg.kind);
  const fs::path csv = fs::path(out_dir.empty() ? "." : out_dir) /
                       (cfg.out_csv.empty() ? base + ".csv" : cfg.out_csv);
  const fs::path repp = fs::path(out_dir.empty() ? "." : out_dir) /
                        (cfg.out_report.empty() ? base + "-report.json" : cfg.out_report);
  {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv.string());
    f << csvText(rep);
  }
  {
    std::ofstream f(repp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + repp.string());
    f << reportJsonText(rep, cfg);
  }
  return csv.string();
}

ConvergenceReport refitCsv(const std::string& csv_text) {
  ConvergenceReport rep;
  rep.kind = ExperimentKind::Diagnostics;
  rep.name = "refit";
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty csv");
  std::vector<std::string>& cols = rep.columns;
  {
    std::istringstream hs(line);
    std::string tok;
    while (std::getline(hs, tok, ',')) cols.push_back(tok);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(rs, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != cols.size()) throw std::invalid_argument("ragged csv row");
    rep.rows.push_back(std::move(row));
  }
  const auto find = [&](const std::string& name) {
    for (size_t c = 0; c < cols.size(); ++c)
      if (cols[c] == name) return static_cast<long>(c);
    return -1L;
  };
  const long eps_col = find("eps");
  if (eps_col < 0) throw std::invalid_argument("csv has no eps column");
  if (rep.rows.size() >= 3) {
    for (size_t c = 0; c < cols.size(); ++c) {
      const std::string& name = cols[c];
      const bool errcol = name.size() > 4 && name.compare(name.size() - 4, 4, "_err") == 0;
      if (!errcol && name != "w_h1") continue;
      std::vector<std::pair<double, double>> pairs;
      for (const auto& row : rep.rows) pairs.push_back({row[eps_col], row[c]});
      rep.fits.push_back({name, fitRate(pairs)});
    }
    const long phi_col = find("phi_h1_over_sqrt_eps");
    if (phi_col >= 0) {
      std::vector<std::pair<double, double>> pairs;
      for (const auto& row : rep.rows)
        pairs.push_back({row[eps_col], row[phi_col] * std::sqrt(row[eps_col])});
      rep.fits.push_back({"phi_h1", fitRate(pairs)});
    }
  }
  rep.pass = true;
  return rep;
}

int exitCode(const ConvergenceReport& rep) {
  if (!rep.ok) return 3;
  return rep.pass ? 0 : 2;
}

ExperimentConfig configFromJson(const json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw std::invalid_argument("config must be a json object");

  const json& ex = j.contains("experiment") ? j.at("experiment") : j;
  const std::string kind = ex.value("kind", "cell");
  if (kind == "cell")
    cfg.kind = ExperimentKind::Cell;
  else if (kind == "torus-sweep")
    cfg.kind = ExperimentKind::TorusSweep;
  else if (kind == "dirichlet-sweep")
    cfg.kind = ExperimentKind::DirichletSweep;
  else if (kind == "diagnostics")
    cfg.kind = ExperimentKind::Diagnostics;
  else
    throw std::invalid_argument("unknown experiment kind: " + kind);

  long family_res = 0;
  if (j.contains("problem")) {
    const json& pj = j.at("problem");
    if (pj.is_string()) {
      const std::string want = pj.get<std::string>();
      bool found = false;
      for (NamedProblem& f : shippedFamilies())
        if (f.name == want) {
          cfg.problem = f.problem;
          family_res = f.cell_resolution;
          found = true;
          break;
        }
      if (!found) throw std::invalid_argument("unknown problem family: " + want);
      cfg.problem_json = pj;
    } else {
      cfg.problem = problemFromJson(pj);
      cfg.problem_json = pj;
    }
  } else if (j.contains("problem_file")) {
    const std::string path = j.at("problem_file").get<std::string>();
    cfg.problem = problemFromFile(path);
    cfg.problem_json = json(path);
  } else if (cfg.kind != ExperimentKind::Diagnostics) {
    throw std::invalid_argument("config needs a problem descriptor");
  }

  cfg.name = ex.value("name", std::string());
  if (ex.contains("eps"))
    for (const json& e : ex.at("eps")) cfg.eps.push_back(parseEpsEntry(e));
  else if (cfg.kind == ExperimentKind::TorusSweep || cfg.kind == ExperimentKind::DirichletSweep)
    cfg.eps = {0.125, 0.0625, 0.03125, 0.015625};

  cfg.cell_resolution = ex.value("cell_resolution", family_res > 0 ? family_res : 256);
  cfg.grid_per_eps = ex.value("grid_per_eps", 16);
  cfg.flux_refine = ex.value("flux_refine", 4);
  cfg.torus_extent = ex.value("extent", 4.0);
  cfg.bounded_corrector = ex.value("bounded_corrector", false);
  cfg.seed = ex.value("seed", 1ull);
  cfg.jobs = ex.value("jobs", 1);

  const std::string variant = ex.value("variant", "steklov");
  if (variant == "steklov")
    cfg.variant = CorrectorVariant::Steklov;
  else if (variant == "fourier")
    cfg.variant = CorrectorVariant::Fourier;
  else if (variant == "plain")
    cfg.variant = CorrectorVariant::NoSmoothing;
  else
    throw std::invalid_argument("unknown corrector variant: " + variant);

  const std::string path = ex.value("path", "general");
  if (path == "general")
    cfg.path = DirichletPath::General;
  else if (path == "bounded-lambda")
    cfg.path = DirichletPath::BoundedLambda;
  else
    throw std::invalid_argument("unknown pipeline path: " + path);

  if (ex.contains("solver")) {
    const json& s = ex.at("solver");
    cfg.solve.tol = s.value("tol", cfg.solve.tol);
    cfg.solve.maxiter = s.value("maxiter", cfg.solve.maxiter);
  }
  if (ex.contains("out")) {
    const json& o = ex.at("out");
    cfg.out_csv = o.value("csv", std::string());
    cfg.out_report = o.value("report", std::string());
  }
  cfg.dump_fields = ex.value("dump_fields", std::string());
  if (ex.contains("families"))
    for (const json& f : ex.at("families")) cfg.families.push_back(f.get<std::string>());
  return cfg;
}

ExperimentConfig configFromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  return configFromJson(j);
}

}  // namespace homog::harness
