#include <doctest.h>

#include <cmath>

#include "core/harness.hpp"
#include "core/problem.hpp"

using homog::Problem;
using homog::model::Constants;

// every entry of Constants is frozen here by hand for the d = 1 trig family
// (alpha0 = alpha1 = 1, sup g = 3, sup g^-1 = 1, r0 = pi, cell volume 1)
TEST_CASE("constants for the 1d trig family") {
  Problem p;
  for (const auto& f : homog::harness::shippedFamilies())
    if (f.name == "d1-trig") p = f.problem;
  REQUIRE(p.dim() == 1);

  const Constants c = p.constants();
  CHECK(c.g_sup == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(c.ginv_sup == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.alpha0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.alpha1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.r0 == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(c.r1 == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(c.coercivity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.boundedness == doctest::Approx(3.0).epsilon(1e-12));

  // contrast sup g * sup g^-1 = 3
  CHECK(c.weight_abs == doctest::Approx(48.0).epsilon(1e-12));
  CHECK(c.weight_grad == doctest::Approx(126.0).epsilon(1e-12));

  CHECK(c.smoothing_gain == doctest::Approx(std::sqrt(3.0) / (2.0 * M_PI)).epsilon(1e-12));
  CHECK(c.corrector_l2_bound ==
        doctest::Approx(std::sqrt(3.0) / (2.0 * M_PI)).epsilon(1e-12));
  CHECK(c.corrector_grad_l2_bound == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(c.hom_h2_factor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(c.has_domain);

  const Constants cd = p.constants(1.0);
  CHECK(cd.has_domain);
  CHECK(cd.energy_bound == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cd.discrepancy_gain == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("constants scale with the coefficient range") {
  Problem lam, el;
  for (const auto& f : homog::harness::shippedFamilies()) {
    if (f.name == "d2-laminate") lam = f.problem;
    if (f.name == "d2-elasticity") el = f.problem;
  }

  const Constants cl = lam.constants(std::sqrt(2.0));
  CHECK(cl.g_sup == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(cl.ginv_sup == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cl.coercivity == doctest::Approx(1.0).epsilon(1e-12));
  // (1 + diam^2) sup g^-1 / alpha0 with diam = sqrt(2)
  CHECK(cl.energy_bound == doctest::Approx(3.0).epsilon(1e-12));

  const Constants ce = el.constants();
  CHECK(ce.m == 3);
  CHECK(ce.alpha0 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ce.alpha1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ce.g_sup == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(ce.ginv_sup == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ce.coercivity == doctest::Approx(1.0).epsilon(1e-10));

  // monotonicity: widening the coefficient range can only grow the weights
  CHECK(cl.weight_abs >= 16.0);
  CHECK(ce.weight_abs >= 16.0 * 3 * 2 * 4);
}
