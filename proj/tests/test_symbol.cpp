#include <doctest.h>

#include <cmath>

#include "core/symbol.hpp"

using homog::CMat;
using homog::Mat;
using homog::Vec;
using homog::model::Symbol;

TEST_CASE("gradient symbol") {
  const Symbol b = Symbol::gradient(2);
  CHECK(b.rows() == 2);
  CHECK(b.cols() == 1);
  CHECK(b.isReal());

  Vec xi(2);
  xi << 1.0, 2.0;
  const CMat v = b.at(xi);
  CHECK(std::abs(v(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(v(1, 0) - 2.0) < 1e-15);

  // b(xi)* b(xi) = |xi|^2, so both ellipticity constants are exactly 1
  const Symbol::Bounds bd = b.ellipticityBounds();
  CHECK(bd.alpha0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bd.alpha1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.maxCoeffNorm() == doctest::Approx(1.0).epsilon(1e-14));

  // [b_1 b_2] with n = 1 is the identity block row
  CHECK((b.realBlockRow() - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("planar elasticity symbol") {
  const Symbol b = Symbol::elasticity2d();
  CHECK(b.rows() == 3);
  CHECK(b.cols() == 2);

  Vec xi(2);
  xi << 0.6, -0.8;
  const CMat v = b.at(xi);
  CHECK(std::abs(v(0, 0) - 0.6) < 1e-15);
  CHECK(std::abs(v(0, 1)) < 1e-15);
  CHECK(std::abs(v(1, 1) + 0.8) < 1e-15);
  CHECK(std::abs(v(2, 0) + 0.8 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v(2, 1) - 0.6 / std::sqrt(2.0)) < 1e-15);

  // b*b has eigenvalues 1 and 1/2 on the whole unit sphere
  const Symbol::Bounds bd = b.ellipticityBounds();
  CHECK(bd.alpha0 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(bd.alpha1 == doctest::Approx(1.0).epsilon(1e-10));

  // block row layout: column a * n + c holds b_a column c
  const Mat B = b.realBlockRow();
  CHECK(B.rows() == 3);
  CHECK(B.cols() == 4);
  CHECK(B(0, 0) == doctest::Approx(1.0));
  CHECK(B(1, 3) == doctest::Approx(1.0));
  CHECK(B(2, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(B(2, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("custom symbol bounds") {
  std::vector<CMat> bl(1);
  bl[0] = CMat::Zero(1, 1);
  bl[0](0, 0) = 2.0;
  const Symbol b = Symbol::custom(1, bl);
  const Symbol::Bounds bd = b.ellipticityBounds();
  CHECK(bd.alpha0 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(bd.alpha1 == doctest::Approx(4.0).epsilon(1e-12));
}
