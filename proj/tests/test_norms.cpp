#include <doctest.h>

#include <cmath>

#include "core/norms.hpp"

using namespace homog;
using fem::Field;
using fem::Grid;

namespace {

Field sineProduct(long N) {
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  Field u(g, 1);
  const long n1 = g.nodesAxis(1);
  for (long i = 0; i <= N; ++i)
    for (long j = 0; j <= N; ++j)
      u.at(i * n1 + j, 0) =
          std::sin(M_PI * g.nodeCoord(0, i)) * std::sin(M_PI * g.nodeCoord(1, j));
  return u;
}

}  // namespace

TEST_CASE("norms of the first box eigenfunction") {
  const Field u = sineProduct(64);
  // int sin^2 sin^2 = 1/4, int |grad|^2 = pi^2 / 2; interpolation error O(h^2)
  CHECK(fem::normL2(u) == doctest::Approx(0.5).epsilon(5e-4));
  CHECK(fem::normH1semi(u) == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(5e-4));
  const double l2 = fem::normL2(u), h1s = fem::normH1semi(u);
  CHECK(fem::normH1(u) ==
        doctest::Approx(std::sqrt(l2 * l2 + h1s * h1s)).epsilon(1e-12));

  // refinement improves both toward the exact values
  const Field u2 = sineProduct(128);
  CHECK(std::abs(fem::normL2(u2) - 0.5) < std::abs(fem::normL2(u) - 0.5));
}

TEST_CASE("difference norms vanish on equal fields") {
  const Field u = sineProduct(16);
  CHECK(fem::normL2Diff(u, u) == doctest::Approx(0.0));
  CHECK(fem::normH1Diff(u, u) == doctest::Approx(0.0));

  Field v = u;
  for (double& x : v.data) x *= 2.0;
  CHECK(fem::normL2Diff(u, v) == doctest::Approx(fem::normL2(u)).epsilon(1e-12));
  CHECK(fem::normH1Diff(u, v) == doctest::Approx(fem::normH1(u)).epsilon(1e-12));
}

TEST_CASE("boundary strip mass of the constant field") {
  const long N = 64;
  const Grid g = Grid::box(2, {N, N, 1}, {1.0, 1.0, 1.0});
  Field one(g, 1);
  for (double& x : one.data) x = 1.0;

  // strip area 1 - (1 - 2 w)^2 = 4 w - 4 w^2; widths aligned to the h/4
  // subcell rule resolve exactly, others to h/4
  for (double w : {0.125, 0.25}) {
    const double want = 4.0 * w - 4.0 * w * w;
    CHECK(fem::stripL2Sq(one, w) == doctest::Approx(want).epsilon(1e-9));
    CHECK(fem::stripL2Sq(one, g, w, fem::StripSide::Inner) ==
          doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(fem::stripL2Sq(one, 0.1) ==
        doctest::Approx(4.0 * 0.1 - 4.0 * 0.01).epsilon(2e-2));

  // two-sided strip on a larger carrier adds the outer collar
  const Grid big = Grid::box(2, {N + 16, N + 16, 1}, {1.25, 1.25, 1.25},
                             {-0.125, -0.125, 0.0});
  Field bigone(big, 1);
  for (double& x : bigone.data) x = 1.0;
  const double w = 0.0625;
  const double inner = 4.0 * w - 4.0 * w * w;
  const double outer = 4.0 * w + 4.0 * w * w;
  CHECK(fem::stripL2Sq(bigone, g, w, fem::StripSide::TwoSided) ==
        doctest::Approx(inner + outer).epsilon(1e-9));
}

TEST_CASE("friedrichs ratio of vanishing fields stays below one") {
  const Field u = sineProduct(32);
  const double r = fem::friedrichsRatio(u);
  // ||u|| / (diam ||Du||) = (1/2) / (sqrt(2) pi / sqrt(2)) = 1 / (2 pi)
  CHECK(r == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(2e-3));
  CHECK(r <= 1.0);
}
