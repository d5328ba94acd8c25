#include <doctest.h>

#include <cmath>
#include <memory>

#include "core/coefficient.hpp"

using homog::Mat;
using homog::Vec;
using homog::model::Coefficient;

TEST_CASE("laminate values and means") {
  const Coefficient g = Coefficient::laminate(2, 1, 1.0, 4.0, 0.5);
  const double lo[2] = {0.25, 0.7};
  const double hi[2] = {0.75, 0.2};
  CHECK(g.at(lo)(0, 0) == doctest::Approx(1.0));
  CHECK(g.at(hi)(0, 0) == doctest::Approx(4.0));
  CHECK(g.scalarTimesIdentity());
  CHECK(g.scalarAt(hi) == doctest::Approx(4.0));

  CHECK(g.meanValue()(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
  // harmonic mean (1/2 (1 + 1/4))^-1 = 1.6
  CHECK(g.harmonicMeanValue()(0, 0) == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(g.normSup() == doctest::Approx(4.0));
  CHECK(g.normInvSup() == doctest::Approx(1.0));
  CHECK(g.minEig() == doctest::Approx(1.0));

  CHECK(g.gridResolves(2));
  CHECK(g.gridResolves(64));
  CHECK_FALSE(g.gridResolves(3));

  const Coefficient g3 = Coefficient::laminate(2, 1, 1.0, 4.0, 0.3);
  CHECK(g3.gridResolves(10));
  CHECK_FALSE(g3.gridResolves(4));
  CHECK(g3.meanValue()(0, 0) == doctest::Approx(0.3 + 0.7 * 4.0).epsilon(1e-14));
}

TEST_CASE("checkerboard pattern") {
  const Coefficient g = Coefficient::checkerboard(1, 1.0, 4.0);
  const double q00[2] = {0.25, 0.25};
  const double q10[2] = {0.75, 0.25};
  const double q11[2] = {0.75, 0.75};
  CHECK(g.scalarAt(q00) == doctest::Approx(1.0));
  CHECK(g.scalarAt(q10) == doctest::Approx(4.0));
  CHECK(g.scalarAt(q11) == doctest::Approx(1.0));
  CHECK(g.meanValue()(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(g.harmonicMeanValue()(0, 0) == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(g.gridResolves(2));
  CHECK_FALSE(g.gridResolves(5));

  // same pattern as an explicit subcell raster
  std::vector<Mat> cells = {Mat::Identity(1, 1) * 1.0, Mat::Identity(1, 1) * 4.0,
                            Mat::Identity(1, 1) * 4.0, Mat::Identity(1, 1) * 1.0};
  const Coefficient r = Coefficient::raster(2, {2, 2, 1}, cells);
  for (double x : {0.1, 0.3, 0.6, 0.9})
    for (double y : {0.2, 0.4, 0.7, 0.95}) {
      const double p[2] = {x, y};
      CHECK(r.at(p)(0, 0) == doctest::Approx(g.scalarAt(p)));
    }
}

TEST_CASE("trig profile") {
  Vec amps(2);
  amps << 0.5, 0.25;
  const Coefficient g = Coefficient::trig(2, 1, 2.0, amps);
  const double p[2] = {0.3, 0.8};
  const double want =
      2.0 + 0.5 * std::cos(2.0 * M_PI * 0.3) + 0.25 * std::cos(2.0 * M_PI * 0.8);
  CHECK(g.scalarAt(p) == doctest::Approx(want).epsilon(1e-14));
  CHECK(g.normSup() == doctest::Approx(2.75).epsilon(1e-14));
  CHECK(g.normInvSup() == doctest::Approx(1.0 / 1.25).epsilon(1e-14));
  CHECK(g.meanValue()(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

  Vec bad(1);
  bad << 2.0;
  CHECK_THROWS_AS(Coefficient::trig(1, 1, 2.0, bad), std::invalid_argument);
}

TEST_CASE("elasticity block with modulation") {
  auto profile = std::make_shared<Coefficient>(Coefficient::laminate(2, 1, 1.0, 2.0, 0.5));
  const Coefficient g = Coefficient::elasticity(1.0, 1.0, profile);
  CHECK(g.rows() == 3);
  CHECK_FALSE(g.scalarTimesIdentity());

  Mat base;
  CHECK(g.scalarProfile(base));
  // mu = lambda = 1: diag blocks lambda + 2 mu = 3, shear 2 mu = 2
  Mat want(3, 3);
  want << 3, 1, 0, 1, 3, 0, 0, 0, 2;
  CHECK((base - want).norm() < 1e-14);

  const double lo[2] = {0.25, 0.5};
  const double hi[2] = {0.75, 0.5};
  CHECK((g.at(lo) - want).norm() < 1e-14);
  CHECK((g.at(hi) - 2.0 * want).norm() < 1e-14);

  // block eigenvalues {4, 2, 2} scaled by the profile range {1, 2}
  CHECK(g.normSup() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(g.normInvSup() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.minEig() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("constant coefficient") {
  Mat v(2, 2);
  v << 2.0, 0.5, 0.5, 3.0;
  const Coefficient g = Coefficient::constant(2, v);
  const double p[2] = {0.9, 0.1};
  CHECK((g.at(p) - v).norm() < 1e-15);
  CHECK((g.meanValue() - v).norm() < 1e-15);
  CHECK((g.harmonicMeanValue() - v).norm() < 1e-12);
  CHECK(g.gridResolves(7));
}
