#include <doctest.h>

#include <cmath>

#include "core/extension.hpp"
#include "core/norms.hpp"

using namespace homog;
using fem::Field;
using fem::Grid;

TEST_CASE("quintic ramp shape") {
  CHECK(fem::quinticRamp(-0.5) == doctest::Approx(1.0));
  CHECK(fem::quinticRamp(0.0) == doctest::Approx(1.0));
  CHECK(fem::quinticRamp(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fem::quinticRamp(1.0) == doctest::Approx(0.0));
  CHECK(fem::quinticRamp(2.0) == doctest::Approx(0.0));

  // flat at both ends, monotone decreasing in between
  const double d = 1e-5;
  CHECK(std::abs(fem::quinticRamp(d) - 1.0) < 1e-9);
  CHECK(std::abs(fem::quinticRamp(1.0 - d)) < 1e-9);
  double prev = 1.0;
  for (double s = 0.05; s < 1.0; s += 0.05) {
    CHECK(fem::quinticRamp(s) <= prev + 1e-15);
    prev = fem::quinticRamp(s);
  }

  CHECK(fem::boundaryCutoff(0.0, 0.25) == doctest::Approx(1.0));
  CHECK(fem::boundaryCutoff(0.25, 0.25) == doctest::Approx(0.0));
}

TEST_CASE("box distances") {
  const Grid g = Grid::box(2, {8, 8, 1}, {1.0, 1.0, 1.0});
  const double inside[2] = {0.3, 0.1};
  const double deep[2] = {0.5, 0.4};
  const double out[2] = {-0.2, 0.5};
  CHECK(fem::boundaryDistance(g, inside) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(fem::boundaryDistance(g, deep) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(fem::boundaryDistance(g, out) == doctest::Approx(0.0));
  CHECK(fem::outsideDistance(g, out) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(fem::outsideDistance(g, inside) == doctest::Approx(0.0));
}

TEST_CASE("reflection extension follows the order-2 rule") {
  const long N = 16, pad = 4;
  const Grid g = Grid::box(1, {N, 1, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  for (long i = 0; i <= N; ++i) {
    const double x = g.nodeCoord(0, i);
    u.at(i, 0) = 0.7 + 0.3 * x * x;
  }
  const Field e = fem::hestenesExtend(u, pad);
  CHECK(e.grid.cells[0] == N + 2 * pad);
  CHECK(e.grid.origin[0] == doctest::Approx(-pad * g.h[0]).epsilon(1e-14));

  // original values preserved; reflected nodes use u(-t) = 3u(t) - 2u(2t)
  for (long i = 0; i <= N; ++i)
    CHECK(e.at(i + pad, 0) == doctest::Approx(u.at(i, 0)).epsilon(1e-14));
  for (long k = 1; k <= pad; ++k) {
    const double want = 3.0 * u.at(k, 0) - 2.0 * u.at(2 * k, 0);
    CHECK(e.at(pad - k, 0) == doctest::Approx(want).epsilon(1e-13));
    const double wantr = 3.0 * u.at(N - k, 0) - 2.0 * u.at(N - 2 * k, 0);
    CHECK(e.at(pad + N + k, 0) == doctest::Approx(wantr).epsilon(1e-13));
  }
}

TEST_CASE("linear fields extend exactly") {
  const long N = 12, pad = 3;
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  const long n1 = g.nodesAxis(1);
  for (long i = 0; i <= N; ++i)
    for (long j = 0; j <= N; ++j)
      u.at(i * n1 + j, 0) = 1.0 + 2.0 * g.nodeCoord(0, i) - g.nodeCoord(1, j);
  const Field e = fem::hestenesExtend(u, pad);
  const long m1 = e.grid.nodesAxis(1);
  double worst = 0;
  for (long i = 0; i < e.grid.nodesAxis(0); ++i)
    for (long j = 0; j < m1; ++j) {
      const double want =
          1.0 + 2.0 * e.grid.nodeCoord(0, i) - e.grid.nodeCoord(1, j);
      worst = std::max(worst, std::abs(e.at(i * m1 + j, 0) - want));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("taper keeps the original box untouched and kills the rim") {
  const long N = 16, pad = 8;
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  for (double& x : u.data) x = 2.0;
  Field e = fem::hestenesExtend(u, pad);
  fem::taperExtension(e, g, pad);

  const long m1 = e.grid.nodesAxis(1);
  const double h = g.h[0];
  for (long i = 0; i < e.grid.nodesAxis(0); ++i)
    for (long j = 0; j < m1; ++j) {
      const double x[2] = {e.grid.nodeCoord(0, i), e.grid.nodeCoord(1, j)};
      const double dist = fem::outsideDistance(g, x);
      const double v = e.at(i * m1 + j, 0);
      if (dist <= pad * h / 2.0 + 1e-12)
        CHECK(v == doctest::Approx(2.0).epsilon(1e-13));
      else if (dist >= pad * h - 1e-12)
        CHECK(std::abs(v) < 1e-13);
    }

  const Field e2 = fem::extendTapered(u, pad);
  CHECK(fem::normL2Diff(e, e2) < 1e-14);
}
