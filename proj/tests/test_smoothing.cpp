#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/harness.hpp"
#include "core/norms.hpp"
#include "core/smoothing.hpp"

using namespace homog;
using fem::Field;
using fem::Grid;

namespace {

Field planeWave(const Grid& g, int k0, int k1, double phase = 0.3) {
  Field u(g, 1);
  const long n1 = g.dim > 1 ? g.nodesAxis(1) : 1;
  for (long i = 0; i < g.nodesAxis(0); ++i)
    for (long j = 0; j < n1; ++j) {
      const double x = g.nodeCoord(0, i);
      const double y = g.dim > 1 ? g.nodeCoord(1, j) : 0.0;
      u.at(i * n1 + j, 0) = std::cos(2.0 * M_PI * (k0 * x + k1 * y) + phase);
    }
  return u;
}

}  // namespace

TEST_CASE("low-pass projection keeps and drops whole modes") {
  const Grid g = Grid::torus(1, {64, 1, 1}, {1.0, 1.0, 1.0});
  const auto lat = model::Lattice::cubic(1);
  const double eps = 0.125;  // cutoff pi / eps = 8 pi: keeps |k| <= 3, drops k = 4

  const Field keep = planeWave(g, 3, 0);
  CHECK(fem::normL2Diff(fem::fourierProject(keep, lat, eps), keep) < 1e-12);

  const Field drop = planeWave(g, 4, 0);
  CHECK(fem::normL2(fem::fourierProject(drop, lat, eps)) < 1e-12);

  // idempotent by construction
  const Field once = fem::fourierProject(keep, lat, eps);
  CHECK(fem::normL2Diff(fem::fourierProject(once, lat, eps), once) < 1e-13);
}

TEST_CASE("projection refuses an unresolved cutoff") {
  const Grid g = Grid::torus(1, {8, 1, 1}, {1.0, 1.0, 1.0});
  const auto lat = model::Lattice::cubic(1);
  Field u(g, 1);
  u.data[0] = 1.0;
  // cutoff 8 pi equals the grid Nyquist pi / h: not strictly resolved
  CHECK_THROWS_AS(fem::fourierProject(u, lat, 0.125), std::invalid_argument);
  CHECK_NOTHROW(fem::fourierProject(u, lat, 0.25));
}

TEST_CASE("cell average acts as the sinc product multiplier") {
  const Grid g = Grid::torus(2, {64, 64, 1}, {4.0, 4.0, 1.0});
  const double eps = 0.25;
  const Field u = planeWave(g, 2, 1);  // xi = 2 pi (2, 1) / 4 = pi (1, 1/2)

  const double xi[2] = {2.0 * M_PI * 2 / 4.0, 2.0 * M_PI * 1 / 4.0};
  const double fac = fem::SteklovSampler::planeWaveFactor(2, eps, xi);
  const double s0 = eps * xi[0] / 2.0, s1 = eps * xi[1] / 2.0;
  CHECK(fac == doctest::Approx((std::sin(s0) / s0) * (std::sin(s1) / s1)).epsilon(1e-13));

  Field want = u;
  for (double& v : want.data) v *= fac;
  CHECK(fem::normL2Diff(fem::steklovProject(u, eps), want) < 1e-11);

  // the order-8 pointwise sampler agrees with the exact multiplier
  fem::SteklovSampler sampler(2, eps);
  double worst = 0;
  for (double x : {0.37, 1.91})
    for (double y : {0.11, 3.05}) {
      const double p[2] = {x, y};
      const double got = sampler.sampleField(u, 0, p);
      const double exact =
          fac * std::cos(xi[0] * x + xi[1] * y + 0.3);
      worst = std::max(worst, std::abs(got - exact));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("smoothing commutes with spectral differentiation") {
  const Grid g = Grid::torus(1, {64, 1, 1}, {1.0, 1.0, 1.0});
  const auto lat = model::Lattice::cubic(1);
  const Field u = planeWave(g, 3, 0);
  const double eps = 0.125;

  const Field a = fem::spectralDerivative(fem::steklovProject(u, eps), lat, 0, 0.0);
  const Field b = fem::steklovProject(fem::spectralDerivative(u, lat, 0, 0.0), eps);
  CHECK(fem::normL2Diff(a, b) < 1e-11);
}

TEST_CASE("contract suite passes for both operators") {
  const auto runSuite = [](int d) {
    const long N = d == 1 ? 128 : 48;
    const Grid g = Grid::torus(d, {N, N, N}, {1.0, 1.0, 1.0});
    const auto lat = model::Lattice::cubic(d);
    std::vector<Field> samples;
    for (int t = 0; t < 6; ++t)
      samples.push_back(harness::randomBandLimited(g, 1, 3, 1000 + t));

    const double eps = 0.125;
    const double amp = d == 1 ? 1.0 : 0.75;
    const auto prof = model::Coefficient::trig(d, 1, 2.0, Vec::Constant(d, amp));
    const auto profile = [&prof](const double* y) { return prof.scalarAt(y); };
    const double rms = std::sqrt(4.0 + d * amp * amp / 2.0);

    const fem::SmoothingSuite pi =
        fem::smoothingSuite(fem::SmoothKind::FourierProjection, samples, lat, eps,
                            1.0 / lat.r0(), profile, rms, 0.05);
    CAPTURE(d);
    CHECK(pi.violations == 0);
    CHECK(pi.worst_decay <= 1.0 + 1e-10);
    CHECK(pi.worst_opnorm <= 1.0 + 1e-12);
    CHECK(pi.worst_mult <= 1.0);
    CHECK(pi.worst_commute <= 1e-10);
    CHECK(pi.worst_linearity <= 1e-13);
    CHECK(pi.worst_idem <= 1e-13);

    const fem::SmoothingSuite st =
        fem::smoothingSuite(fem::SmoothKind::Steklov, samples, lat, eps, lat.r1(),
                            profile, rms, 0.05);
    CHECK(st.violations == 0);
    CHECK(st.worst_decay <= 1.0 + 1e-10);
    CHECK(st.worst_opnorm <= 1.0 + 1e-12);
    CHECK(st.worst_mult <= 1.0);
    CHECK(st.worst_commute <= 1e-10);
    CHECK(st.worst_linearity <= 1e-13);
  };
  runSuite(1);
  runSuite(2);
}

TEST_CASE("plane wave factor handles small arguments") {
  const double xi0[1] = {1e-9};
  CHECK(fem::SteklovSampler::planeWaveFactor(1, 0.125, xi0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double xi1[1] = {0.0};
  CHECK(fem::SteklovSampler::planeWaveFactor(1, 0.125, xi1) == doctest::Approx(1.0));
}
