#include <doctest.h>

#include <cmath>

#include "core/cell.hpp"
#include "core/harness.hpp"

using namespace homog;

namespace {

Problem family(const char* name) {
  for (const auto& f : harness::shippedFamilies())
    if (f.name == name) return f.problem;
  throw std::runtime_error("no such family");
}

}  // namespace

TEST_CASE("1d trig cell recovers the harmonic mean sqrt(3)") {
  const Problem p = family("d1-trig");
  const CellSolution sol = solveCell(p, 1024);
  // closed form: (int dy / (2 + cos 2 pi y))^-1 = sqrt(3)
  CHECK(std::abs(sol.g_eff(0, 0) - std::sqrt(3.0)) < 1e-6);
  CHECK(sol.skew < 1e-12);

  const CellChecks ch = cellChecks(sol, p);
  CHECK(ch.square_symbol);  // m = n = 1
  CHECK(std::abs(sol.g_eff(0, 0) - ch.g_under(0, 0)) < 1e-9);
}

TEST_CASE("laminate cell is exact on resolved grids") {
  const Problem p = family("d2-laminate");
  const CellSolution sol = solveCell(p, 8);
  // piecewise-linear corrector lies in the Q1 space, so even N = 8 is exact:
  // diag(harmonic mean, arithmetic mean) = diag(1.6, 2.5)
  CHECK(std::abs(sol.g_eff(0, 0) - 1.6) < 1e-9);
  CHECK(std::abs(sol.g_eff(1, 1) - 2.5) < 1e-9);
  CHECK(std::abs(sol.g_eff(0, 1)) < 1e-10);

  // second column needs no corrector (no variation along y2)
  const int n = sol.n;
  double col1 = 0;
  for (long i = 0; i < sol.corrector.nodes(); ++i)
    col1 = std::max(col1, std::abs(sol.corrector.at(i, 1 * n + 0)));
  CHECK(col1 < 1e-10);

  // flux of column 0 is flat at the harmonic mean; column 1 carries g(y)
  const double ya[2] = {0.26, 0.6};
  const double yb[2] = {0.77, 0.1};
  const Mat fa = fluxMatrixAt(sol, p.coefficient, p.symbol, ya);
  const Mat fb = fluxMatrixAt(sol, p.coefficient, p.symbol, yb);
  CHECK(fa(0, 0) == doctest::Approx(1.6).epsilon(1e-9));
  CHECK(fb(0, 0) == doctest::Approx(1.6).epsilon(1e-9));
  CHECK(std::abs(fa(1, 0)) < 1e-9);
  CHECK(fa(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fb(1, 1) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("checkerboard cell approaches the duality value 2 I") {
  const Problem p = family("d2-checkerboard");
  const CellSolution sol = solveCell(p, 64);
  // exact effective matrix is sqrt(1 * 4) I by the interchange duality
  CHECK(std::abs(sol.g_eff(0, 0) - 2.0) / 2.0 < 0.01);
  CHECK(std::abs(sol.g_eff(1, 1) - 2.0) / 2.0 < 0.01);
  CHECK(std::abs(sol.g_eff(0, 1)) < 1e-8);
}

TEST_CASE("constant coefficient has no corrector") {
  const Problem p = family("d2-constant");
  const CellSolution sol = solveCell(p, 32);
  CHECK(sol.corrector_l2 < 1e-10);
  CHECK(sol.corrector_grad_l2 < 1e-10);
  const CellChecks ch = cellChecks(sol, p);
  CHECK(ch.corrector_vanishes);
  CHECK((sol.g_eff - ch.g_bar).norm() < 1e-10);
}

TEST_CASE("cell checks hold on every shipped family") {
  for (const auto& f : harness::shippedFamilies()) {
    CAPTURE(f.name);
    // small grids here; the acceptance run uses the shipped resolutions
    const long N = f.problem.dim() == 1 ? 256 : 64;
    const CellSolution sol = solveCell(f.problem, N);
    const CellChecks ch = cellChecks(sol, f.problem);
    const model::Constants K = f.problem.constants();

    CHECK(ch.margin_lower >= -1e-8 * K.g_sup);
    CHECK(ch.margin_upper >= -1e-8 * K.g_sup);
    CHECK(ch.norm_margin >= -1e-8 * K.g_sup);
    CHECK(ch.inv_norm_margin >= -1e-8 * K.ginv_sup);
    CHECK(ch.min_eig > 0);
    CHECK(ch.mean_flux_defect < 1e-10 * std::max(1.0, K.g_sup));
    CHECK(sol.corrector_l2 <= K.corrector_l2_bound * (1 + 1e-9));
    CHECK(sol.corrector_grad_l2 <= K.corrector_grad_l2_bound * (1 + 1e-9));

    // corrector columns average to zero over the cell
    for (int c = 0; c < sol.corrector.ncomp; ++c) {
      double mean = 0;
      for (long i = 0; i < sol.corrector.nodes(); ++i) mean += sol.corrector.at(i, c);
      CHECK(std::abs(mean / sol.corrector.nodes()) < 1e-10);
    }
  }
}

TEST_CASE("corrector raster round trip") {
  const Problem p = family("d2-laminate");
  const CellSolution sol = solveCell(p, 16);
  const RasterData r = correctorRaster(sol);
  CHECK(r.dim == 2);
  CHECK(r.rows == sol.n);
  CHECK(r.cols == sol.m);
  CHECK(r.dims[0] == 16);
  CHECK(r.dims[1] == 16);
  CHECK(r.data.size() == static_cast<size_t>(sol.corrector.nodes()) * sol.n * sol.m);
}

TEST_CASE("weighted corrector diagnostics accept the 1d trig family") {
  const Problem p = family("d1-trig");
  const CellSolution sol = solveCell(p, 128);
  const model::Constants K = p.constants();

  std::vector<fem::Field> tests;
  for (int t = 0; t < 2; ++t)
    tests.push_back(harness::randomBump(unitBox(1, 256), 3, 17 + t));

  const LambdaDiagnostics diag = lambdaDiagnostics(sol, K, tests, {0.125, 0.0625});
  CHECK(diag.violations == 0);
  CHECK(diag.lambda_l2 <= diag.lambda_l2_bound);
  CHECK(diag.dlambda_l2 <= diag.dlambda_l2_bound);
  REQUIRE(diag.rows.size() == 4);
  for (const auto& row : diag.rows) {
    CHECK_FALSE(row.violated);
    CHECK(row.lhs <= row.rhs * (1 + 1e-9));
  }
}
