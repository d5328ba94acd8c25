#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/operators.hpp"
#include "core/solver.hpp"

using namespace homog;
using fem::BC;
using fem::Field;
using fem::Grid;

namespace {

// manufactured discrete test: pick nodal u*, form rhs = A u*, solve, compare
double roundTrip(const fem::Operator& A, const std::vector<double>& ustar,
                 const fem::SolveOptions& opts, long* iters = nullptr) {
  std::vector<double> rhs(ustar.size());
  A.apply(ustar.data(), rhs.data());
  std::vector<double> x;
  const fem::SolveReport rep = fem::solve(A, rhs, x, opts);
  CHECK(rep.converged);
  if (iters) *iters = rep.iterations;
  double err = 0;
  for (size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - ustar[i]));
  return err;
}

}  // namespace

TEST_CASE("periodic solve with spectral preconditioner") {
  const long N = 32;
  const Grid g = Grid::torus(2, {N, N, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  Vec amps(2);
  amps << 0.5, 0.25;
  const auto coef = model::Coefficient::trig(2, 1, 2.0, amps);
  const fem::Operator A(g, sym, coef, 0.25, 1.0, BC::Periodic);

  std::vector<double> ustar(g.nodeCount());
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j)
      ustar[i * N + j] = std::sin(2.0 * M_PI * i / N) + 0.3 * std::cos(2.0 * M_PI * j / N);

  fem::SolveOptions opts;
  opts.tol = 1e-12;
  CHECK(roundTrip(A, ustar, opts) < 1e-9);
}

TEST_CASE("dirichlet solve on the box") {
  const long N = 24;
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  const auto coef = model::Coefficient::checkerboard(1, 1.0, 4.0);
  const fem::Operator A(g, sym, coef, 0.25, 0.0, BC::Dirichlet0);

  std::vector<double> ustar(g.nodeCount(), 0.0);
  const long n1 = g.nodesAxis(1);
  for (long i = 0; i <= N; ++i)
    for (long j = 0; j <= N; ++j)
      ustar[i * n1 + j] =
          std::sin(M_PI * i / double(N)) * std::sin(2.0 * M_PI * j / double(N));

  fem::SolveOptions opts;
  opts.tol = 1e-12;
  long iters = 0;
  CHECK(roundTrip(A, ustar, opts, &iters) < 1e-9);
  CHECK(iters > 0);
}

TEST_CASE("singular periodic system solves in the mean-zero complement") {
  const long N = 16;
  const Grid g = Grid::torus(1, {N, 1, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(1);
  const auto coef =
      model::Coefficient::laminate(1, 1, 1.0, 4.0, 0.5);
  const fem::Operator A(g, sym, coef, 1.0, 0.0, BC::Periodic);

  // mean-zero target; rhs gains no mean component since A 1 = 0
  std::vector<double> ustar(N);
  for (long i = 0; i < N; ++i) ustar[i] = std::sin(2.0 * M_PI * i / N);
  fem::projectMeanZero(1, ustar);

  fem::SolveOptions opts;
  opts.tol = 1e-12;
  CHECK(roundTrip(A, ustar, opts) < 1e-9);
}

TEST_CASE("solver failure raises instead of returning garbage") {
  const long N = 64;
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  const auto coef = model::Coefficient::checkerboard(1, 1.0, 100.0);
  const fem::Operator A(g, sym, coef, 1.0 / 8, 0.0, BC::Dirichlet0);

  std::vector<double> rhs(g.nodeCount(), 1.0);
  std::vector<double> x;
  fem::SolveOptions opts;
  opts.tol = 1e-14;
  opts.maxiter = 2;
  opts.method = fem::SolveOptions::Method::CG;
  opts.precond = fem::SolveOptions::Precond::Jacobi;
  CHECK_THROWS_AS(fem::solve(A, rhs, x, opts), std::runtime_error);
}

TEST_CASE("separable direct path agrees with cg") {
  const long N = 48;
  const Grid g = Grid::torus(2, {N, N, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  // varies along axis 0 only: tensor factorization applies
  const auto coef = model::Coefficient::laminate(2, 1, 1.0, 4.0, 0.5);
  const fem::Operator A(g, sym, coef, 0.25, 1.0, BC::Periodic);

  std::vector<double> rhs(g.nodeCount());
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j)
      rhs[i * N + j] = std::cos(2.0 * M_PI * (i + 2 * j) / N);

  fem::SolveOptions direct;
  direct.tol = 1e-12;
  std::vector<double> xd;
  const fem::SolveReport rd = fem::solve(A, rhs, xd, direct);
  CHECK(rd.converged);

  fem::SolveOptions cg;
  cg.tol = 1e-12;
  cg.method = fem::SolveOptions::Method::CG;
  std::vector<double> xc;
  CHECK(fem::solve(A, rhs, xc, cg).converged);

  double diff = 0;
  for (size_t i = 0; i < xd.size(); ++i) diff = std::max(diff, std::abs(xd[i] - xc[i]));
  CHECK(diff < 1e-8);
}
