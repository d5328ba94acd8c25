#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/operators.hpp"
#include "core/norms.hpp"

using namespace homog;
using fem::BC;
using fem::Field;
using fem::Grid;

TEST_CASE("grid basics") {
  const Grid t = Grid::torus(2, {8, 4, 1}, {2.0, 1.0, 1.0});
  CHECK(t.nodesAxis(0) == 8);
  CHECK(t.nodesAxis(1) == 4);
  CHECK(t.nodeCount() == 32);
  CHECK(t.cellCount() == 32);
  CHECK(t.h[0] == doctest::Approx(0.25));
  CHECK(t.extent(0) == doctest::Approx(2.0));
  CHECK(t.wrapNode(0, 8) == 0);
  CHECK(t.wrapNode(0, -1) == 7);

  const Grid b = Grid::box(2, {8, 8, 1}, {1.0, 1.0, 1.0});
  CHECK(b.nodesAxis(0) == 9);
  CHECK(b.nodeCount() == 81);
  CHECK(b.wrapNode(0, 8) == 8);
}

TEST_CASE("bilinear evaluation is exact on multilinear fields") {
  const Grid g = Grid::box(2, {16, 16, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  for (long i = 0; i < g.nodesAxis(0); ++i)
    for (long j = 0; j < g.nodesAxis(1); ++j) {
      const double x = g.nodeCoord(0, i), y = g.nodeCoord(1, j);
      u.at(i * g.nodesAxis(1) + j, 0) = 2.0 + 3.0 * x - y + 0.5 * x * y;
    }
  for (double x : {0.03, 0.41, 0.77})
    for (double y : {0.12, 0.5, 0.99}) {
      const double p[2] = {x, y};
      const double want = 2.0 + 3.0 * x - y + 0.5 * x * y;
      CHECK(fem::evalField(u, p, 0) == doctest::Approx(want).epsilon(1e-13));
      double grad[2];
      fem::evalFieldGradient(u, p, 0, grad);
      CHECK(grad[0] == doctest::Approx(3.0 + 0.5 * y).epsilon(1e-12));
      CHECK(grad[1] == doctest::Approx(-1.0 + 0.5 * x).epsilon(1e-12));
    }
}

TEST_CASE("halving restriction picks coarse nodes") {
  const Grid f = Grid::box(1, {16, 1, 1}, {1.0, 1.0, 1.0});
  Field u(f, 1);
  for (long i = 0; i < u.nodes(); ++i) u.at(i, 0) = std::sin(0.37 * i);
  const Field c = fem::restrictHalf(u);
  CHECK(c.grid.cells[0] == 8);
  for (long i = 0; i <= 8; ++i)
    CHECK(c.at(i, 0) == doctest::Approx(u.at(2 * i, 0)).epsilon(1e-15));
}

TEST_CASE("nodal gradients are exact interior on bilinear fields") {
  const Grid g = Grid::box(2, {12, 12, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  const long n1 = g.nodesAxis(1);
  for (long i = 0; i < g.nodesAxis(0); ++i)
    for (long j = 0; j < n1; ++j)
      u.at(i * n1 + j, 0) = g.nodeCoord(0, i) * g.nodeCoord(1, j);
  const Field du = fem::nodalGradients(u);
  CHECK(du.ncomp == 2);
  for (long i = 1; i + 1 < g.nodesAxis(0); ++i)
    for (long j = 1; j + 1 < n1; ++j) {
      CHECK(du.at(i * n1 + j, 0) == doctest::Approx(g.nodeCoord(1, j)).epsilon(1e-13));
      CHECK(du.at(i * n1 + j, 1) == doctest::Approx(g.nodeCoord(0, i)).epsilon(1e-13));
    }
}

TEST_CASE("operator matches the 1d stencil eigenvalues") {
  const long N = 32;
  const double h = 1.0 / N;
  const Grid g = Grid::torus(1, {N, 1, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(1);
  const auto coef = model::Coefficient::constant(1, Mat::Identity(1, 1));
  const double sigma = 2.0;
  const fem::Operator A(g, sym, coef, 1.0, sigma, BC::Periodic);

  Field u(g, 1);
  for (long i = 0; i < N; ++i) u.at(i, 0) = std::cos(2.0 * M_PI * i * h);
  std::vector<double> y(N);
  A.apply(u.data.data(), y.data());

  const double th = 2.0 * M_PI * h;
  const double lam_k = (2.0 - 2.0 * std::cos(th)) / h;
  const double lam_m = h * (2.0 + std::cos(th)) / 3.0;
  for (long i = 0; i < N; ++i)
    CHECK(y[i] == doctest::Approx((lam_k + sigma * lam_m) * u.at(i, 0)).epsilon(1e-11));

  // mass row applied to the constant recovers the cell size
  std::vector<double> ones(N, 1.0), m(N);
  A.massApply(ones.data(), m.data());
  for (long i = 0; i < N; ++i) CHECK(m[i] == doctest::Approx(h).epsilon(1e-13));
}

TEST_CASE("load assembly integrates hat functions exactly") {
  const Grid g = Grid::box(2, {8, 8, 1}, {1.0, 1.0, 1.0});
  const double h = g.h[0];
  const Field load = fem::assembleLoad(
      g, 1, [](const double*, double* out) { out[0] = 1.0; });
  const long n1 = g.nodesAxis(1);
  CHECK(load.at(3 * n1 + 4, 0) == doctest::Approx(h * h).epsilon(1e-13));
  CHECK(load.at(0, 0) == doctest::Approx(h * h / 4.0).epsilon(1e-13));
  CHECK(load.at(5 * n1 + 0, 0) == doctest::Approx(h * h / 2.0).epsilon(1e-13));

  double total = 0;
  for (double v : load.data) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("dirichlet rows act as identity") {
  const Grid g = Grid::box(2, {8, 8, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  const auto coef = model::Coefficient::constant(2, Mat::Identity(2, 2) * 2.0);
  const fem::Operator A(g, sym, coef, 1.0, 0.0, BC::Dirichlet0);
  Field u(g, 1);
  for (long i = 0; i < u.nodes(); ++i) u.at(i, 0) = 0.1 * i;
  std::vector<double> y(u.data.size());
  A.apply(u.data.data(), y.data());
  const auto& mask = A.boundaryMask();
  for (long i = 0; i < u.nodes(); ++i)
    if (mask[i]) CHECK(y[i] == doctest::Approx(u.at(i, 0)).epsilon(1e-14));
}

TEST_CASE("flux point walk reproduces constant symbol gradients") {
  const Grid g = Grid::box(2, {6, 6, 1}, {1.0, 1.0, 1.0});
  const auto sym = model::Symbol::gradient(2);
  Field u(g, 1);
  const long n1 = g.nodesAxis(1);
  for (long i = 0; i < g.nodesAxis(0); ++i)
    for (long j = 0; j < n1; ++j)
      u.at(i * n1 + j, 0) = 2.0 * g.nodeCoord(0, i) - 3.0 * g.nodeCoord(1, j);
  double vol = 0, worst = 0;
  fem::forEachFluxPoint(u, sym, [&](const double*, double w, const double* G) {
    vol += w;
    worst = std::max({worst, std::abs(G[0] - 2.0), std::abs(G[1] + 3.0)});
  });
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(worst < 1e-12);
}
