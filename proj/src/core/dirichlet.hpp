#pragma once

#include <functional>
#include <vector>

#include "core/cell.hpp"
#include "core/problem.hpp"
#include "core/solver.hpp"

namespace homog {

enum class DirichletPath {
  General,        // corrector data extended, smoothed, restricted
  BoundedLambda,  // plain nodal corrector data; needs the boundedness assertion
};

struct DirichletRow {
  double eps = 0;
  double h1_corr_err = 0;           // ||u - v||_H1 / ||F||
  double l2_err = 0;                // ||u - u0||_L2 / ||F||
  double flux_err = 0;              // flux comparison on the fine grid / ||F||
  double phi_h1_over_sqrt_eps = 0;  // ||phi||_H1 / (sqrt(eps) ||F||)
  double w_h1 = 0;                  // ||w||_H1 / ||F||
  double gamma0_slack = 0;          // gamma0 ||phi||_H1 - ||w||_H1; negative = violation
  double plain_h1_err = 0;          // ||u - u0||_H1 / ||F||, corrector switched off
  double richardson_order = 0;      // observed order of the three-grid ladder
  double h2_ratio = 0;              // discrete second-difference norm of u0 / ||F||
  long resolution = 0;              // comparison cells per axis
  long cg_iters = 0;
};

/*! One scale of the bounded-domain pipeline with its fields kept, all on the
 *  comparison grid; `smoothed` holds the corrector data S (m components).
 */
struct DirichletStage {
  DirichletRow row;
  fem::Field u_rich;
  fem::Field u0;
  fem::Field v;
  fem::Field smoothed;
  fem::Field phi;
  fem::Field w;
};

struct DirichletOptions {
  DirichletPath path = DirichletPath::General;
  bool bounded_corrector = false;  // gate for the BoundedLambda path
  long grid_per_eps = 16;          // comparison h = eps / grid_per_eps
  long flux_refine = 4;            // flux reference solved at flux_refine * N
  double richardson_min_order = 1.8;
  fem::SolveOptions solve;
  // nodal forcing, fills n values at x; empty -> d pi^2 prod_j sin(pi x_j) in
  // component 0
  std::function<void(const double*, double*)> forcing;
};

struct DirichletSweepResult {
  std::vector<DirichletRow> rows;
};

/*! Full pipeline at one scale on the unit box: oscillatory solve with a
 *  doubled-grid reference (Richardson on shared nodes, ladder order checked),
 *  homogenized solve, corrector and its boundary discrepancy, and a flux
 *  comparison on a finer dedicated grid.  Both solves assert the a-priori
 *  energy bound.
 */
DirichletStage dirichletStage(const Problem& p, const CellSolution& cell, double eps,
                              const DirichletOptions& opt = {});

DirichletSweepResult dirichletSweep(const Problem& p, const CellSolution& cell,
                                    const std::vector<double>& eps_list,
                                    const DirichletOptions& opt = {});

// unit-box grid helper shared by the sweeps and tests
fem::Grid unitBox(int dim, long cells);

}  // namespace homog
