#pragma once

#include <vector>

#include "core/cell.hpp"
#include "core/problem.hpp"
#include "core/solver.hpp"

namespace homog {

enum class CorrectorVariant { Fourier, Steklov, NoSmoothing };

struct TorusRow {
  double eps = 0;
  double l2_err = 0;       // ||u_rich - u0|| / ||F||
  double h1_corr_err = 0;  // ||u_rich - v|| (full H1) / ||F||
  long ref_resolution = 0;
  long cg_iters = 0;       // summed over the three solves of the row
};

struct TorusSweepOptions {
  double extent = 4.0;  // torus edge in cell units (integer)
  CorrectorVariant variant = CorrectorVariant::Steklov;
  bool bounded_corrector = false;  // gate for the unsmoothed variant
  double sigma = 1.0;
  long grid_per_eps = 16;  // comparison h = eps / grid_per_eps
  fem::SolveOptions solve;
};

struct TorusSweepResult {
  std::vector<TorusRow> rows;
};

/*! Resolvent sweep on the periodic torus: for each eps solves the
 *  oscillatory and homogenized problems (sigma-shifted), forms the
 *  first-order corrected field with the selected smoothing, and measures
 *  errors against a same-eps reference on a doubled grid with nodal
 *  Richardson extrapolation.
 */
TorusSweepResult torusSweep(const Problem& p, const CellSolution& cell,
                            const std::vector<double>& eps_list,
                            const TorusSweepOptions& opt = {});

// forcing used by the sweeps: prod_j sin(2 pi x_j / extent_j) in component 0
fem::Field sweepForcing(const fem::Grid& g, int ncomp);

// symbol flux components G = B Du from node-averaged gradients
fem::Field symbolGradients(const fem::Field& u, const model::Symbol& sym);

// Sobolev norm of the trigonometric interpolant through the nodal values:
// sqrt of sum over modes of (1 + |xi|^2 + ... + |xi|^(2 order)) |c_k|^2 * vol
double spectralSobolevNorm(const fem::Field& u, int order);

}  // namespace homog
