#pragma once

#include <string>
#include <vector>

#include "core/operators.hpp"

namespace homog::fem {

struct SolveOptions {
  double tol = 1e-10;
  long maxiter = 0;  // 0: 20 sqrt(dof) + 200
  enum class Method { Auto, CG, Direct } method = Method::Auto;
  enum class Precond { Auto, Jacobi, Spectral } precond = Precond::Auto;
};

struct SolveReport {
  long iterations = 0;
  double rel_residual = 0;
  bool converged = false;
  std::string method;
};

/*! Solves A x = rhs.  x is overwritten (zero initial guess).
 *
 *  Singular periodic systems (sigma = 0) are solved in the mean-zero
 *  complement per component; rhs is projected accordingly.  Dirichlet
 *  systems force zero boundary values on rhs and solution.
 *
 *  Scalar coefficients that vary along at most one axis are detected and
 *  dispatched to an exact tensor factorization (FFT or sine transform across
 *  the constant axes, tridiagonal solves along the varying one); its result
 *  is residual-checked against A and falls back to CG on any defect.
 */
SolveReport solve(const Operator& A, const std::vector<double>& rhs, std::vector<double>& x,
                  const SolveOptions& opts = {});

// mean-zero projection per component, nodal
void projectMeanZero(int ncomp, std::vector<double>& v);

}  // namespace homog::fem
