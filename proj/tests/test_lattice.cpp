#include <doctest.h>

#include <cmath>

#include "core/lattice.hpp"

using homog::Mat;
using homog::model::Lattice;

TEST_CASE("cubic lattice geometry") {
  for (int d = 1; d <= 3; ++d) {
    const Lattice lat = Lattice::cubic(d);
    CHECK(lat.dim() == d);
    CHECK(lat.cellVolume() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lat.isCubic());
    // dual basis 2 pi I; shortest dual vector 2 pi, half of it is pi
    CHECK((lat.dual() - 2.0 * M_PI * Mat::Identity(d, d)).norm() < 1e-12);
    CHECK(lat.r0() == doctest::Approx(M_PI).epsilon(1e-14));
    CHECK(lat.r1() == doctest::Approx(0.5 * std::sqrt(double(d))).epsilon(1e-14));
  }
}

TEST_CASE("hexagonal lattice radii") {
  Mat basis(2, 2);
  basis << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const Lattice lat = Lattice::fromBasis(basis);
  CHECK(lat.cellVolume() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK_FALSE(lat.isCubic());

  // biorthogonality <b_i, a_j> = 2 pi delta_ij
  const Mat prod = lat.dual().transpose() * lat.basis();
  CHECK((prod - 2.0 * M_PI * Mat::Identity(2, 2)).norm() < 1e-12);

  // shortest dual vectors have length 4 pi / sqrt(3); cell diagonal
  // max(|a1 + a2|, |a1 - a2|) = sqrt(3)
  CHECK(lat.r0() == doctest::Approx(2.0 * M_PI / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(lat.r1() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("degenerate basis is rejected") {
  Mat basis(2, 2);
  basis << 1.0, 2.0, 1.0, 2.0;
  CHECK_THROWS_AS(Lattice::fromBasis(basis), std::invalid_argument);
}
