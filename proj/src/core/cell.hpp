#pragma once

#include <vector>

#include "core/mesh.hpp"
#include "core/problem.hpp"
#include "core/raster.hpp"
#include "core/solver.hpp"

namespace homog {

/*! Periodic cell solve: for each unit flux direction j = 1..m the corrector
 *  column solves  integral <g (G v_j + e_j), G eta> = 0  over the unit cell
 *  for all periodic eta, with G the symbol's gradient map and zero mean
 *  enforced.  The effective matrix is the quadrature-consistent average of
 *  the pointwise flux matrix g (G v + 1_m).
 */
struct CellSolution {
  fem::Field corrector;  // torus cell grid; component j * n + c = column j, row c
  Mat g_eff;             // m x m, Hermitized
  double skew = 0;       // asymmetry magnitude before Hermitization

  // m x m flux matrix per element (row major), sampled at element centers;
  // its mean reproduces g_eff up to the Hermitization step
  std::vector<double> flux_matrix;

  double corrector_l2 = 0;       // ||v|| over the cell, all entries
  double corrector_grad_l2 = 0;  // ||Dv||
  double corrector_max = 0;      // max nodal Frobenius norm (empirical)

  long resolution = 0;
  long iterations = 0;  // total over columns
  double residual = 0;  // worst relative residual
  int n = 1, m = 1;
};

CellSolution solveCell(const Problem& p, long resolution,
                       const fem::SolveOptions& opts = {});

// pointwise flux matrix g(y) (G(v)(y) + 1_m) using the piecewise-bilinear
// corrector gradients at y (cell coordinates, wrapped periodically)
Mat fluxMatrixAt(const CellSolution& sol, const model::Coefficient& coef,
                 const model::Symbol& sym, const double* y);

/*! Bound and structure checks derived from the coefficient alone:
 *  arithmetic/harmonic means, Loewner margins in both directions, norm
 *  bounds on g_eff and its inverse, and the two degenerate cases (vanishing
 *  corrector, square symbol).
 */
struct CellChecks {
  Mat g_bar, g_under;
  double margin_upper = 0;      // lambda_min(g_bar - g_eff)
  double margin_lower = 0;      // lambda_min(g_eff - g_under)
  double norm_margin = 0;       // ||g||_sup - |g_eff|
  double inv_norm_margin = 0;   // ||g^-1||_sup - |g_eff^-1|
  double min_eig = 0;           // lambda_min(g_eff)
  double mean_flux_defect = 0;  // |mean(flux_matrix) - g_eff|
  bool corrector_vanishes = false;  // then g_eff = g_bar
  bool square_symbol = false;       // m = n, then g_eff = g_under
};

CellChecks cellChecks(const CellSolution& sol, const Problem& p);

// corrector raster (rows = n, cols = m, nodal values)
RasterData correctorRaster(const CellSolution& sol);

/*! Oscillatory-weight diagnostics for the corrector.  Checks the measured
 *  cell norms against their a-priori bounds and, for every (test, eps) pair,
 *  the weighted inequality
 *    int |(Dv)(x/eps)|^2 |u(x)|^2 dx
 *      <= weight_abs ||u||^2 + weight_grad eps^2 int |v(x/eps)|^2 |Du(x)|^2 dx
 *  with all three integrals sharing one composite midpoint rule over the test
 *  function's carrier.  A failing pair is retried once with the subcell count
 *  doubled before it counts as a violation.
 */
struct LambdaDiagnostics {
  double lambda_l2 = 0, lambda_l2_bound = 0;
  double dlambda_l2 = 0, dlambda_l2_bound = 0;

  struct Row {
    double eps = 0, lhs = 0, rhs = 0;
    bool refined = false, violated = false;
  };
  std::vector<Row> rows;  // tests outer, eps inner
  long violations = 0;    // norm-bound failures plus inequality failures
};

LambdaDiagnostics lambdaDiagnostics(const CellSolution& sol, const model::Constants& K,
                                    const std::vector<fem::Field>& tests,
                                    const std::vector<double>& eps_list);

/*! First-order corrected field  v = u0 + eps * v_col_j(x / eps) W_j(x)
 *  at the nodes of u0's grid; W holds the m smoothed flux components.
 *  The corrector is evaluated by periodic multilinear interpolation.
 */
fem::Field correctedField(const fem::Field& u0, const CellSolution& sol, double eps,
                          const fem::Field& W);

}  // namespace homog
