#pragma once

#include <functional>

#include "core/lattice.hpp"
#include "core/mesh.hpp"

namespace homog::fem {

/*! Sharp low-pass filter on torus fields: keeps the discrete Fourier modes
 *  whose frequency xi lies strictly inside the dual cell scaled by 1/eps,
 *  zeroes the rest (including the unpaired Nyquist modes).  For a cubic
 *  lattice the membership test is componentwise |xi_j| < pi/eps; general
 *  lattices use the Voronoi inequality |eps xi| < |eps xi - b| over a window
 *  of nonzero dual points.  The cutoff must lie below the grid Nyquist
 *  frequency on every axis.
 */
Field fourierProject(const Field& u, const model::Lattice& lattice, double eps);

/*! Spectral partial derivative of the trigonometric interpolant along `axis`,
 *  with the same strict cutoff applied when eps > 0 (eps = 0 keeps all modes
 *  except Nyquist).  Torus fields only.
 */
Field spectralDerivative(const Field& u, const model::Lattice& lattice, int axis,
                         double eps);

/*! Cell-average smoothing of a whole torus field through the exact multiplier
 *  prod_j sinc(eps xi_j / 2) of the trigonometric interpolant (cubic cell).
 *  Agrees with the pointwise Gauss sampler on resolved plane waves to the
 *  quadrature tolerance; Nyquist modes are dropped like in every other
 *  spectral filter here.
 */
Field steklovProject(const Field& u, double eps);

/*! Tensor Gauss rule for the cell-average smoothing
 *    (S_eps u)(x) = integral over z in (-1/2,1/2)^d of u(x - eps z) dz.
 *  Default order 8 per axis keeps the quadrature error below 1e-10 for
 *  eps|xi| <= 4 on plane waves.
 */
class SteklovSampler {
 public:
  SteklovSampler(int dim, double eps, int order = 8);

  int dim() const { return dim_; }
  double eps() const { return eps_; }
  int points() const { return npts_; }

  // average of the multilinear interpolant of w, component comp; torus
  // carriers wrap, box carriers must contain every sample point
  double sampleField(const Field& w, int comp, const double* x) const;

  // average of an arbitrary callable
  double sample(const std::function<double(const double*)>& f, const double* x) const;

  // closed-form multiplier on the plane wave exp(i<xi, x>)
  static double planeWaveFactor(int dim, double eps, const double* xi);

 private:
  int dim_ = 0, order_ = 0, npts_ = 0;
  double eps_ = 0;
  std::vector<double> z_, w_;  // tensor nodes (dim per point) and weights
};

enum class SmoothKind { FourierProjection, Steklov };

/*! Contract report for one smoothing operator over a sample set.  Ratios are
 *  worst observed left side over right side; a ratio above 1 (plus roundoff
 *  headroom) counts as a violation.  `rate` is the decay constant of the
 *  operator at hand: the inverse inscribed radius of the dual cell for the
 *  low-pass projection, half the cell diameter for the cell average.
 *
 *  Samples must be band limited below the grid Nyquist frequency; the decay
 *  bound compares against the spectral gradient norm and would miss Nyquist
 *  energy, which the filters drop.
 */
struct SmoothingSuite {
  double worst_decay = 0;      // ||op u - u|| vs eps * rate * ||Du||
  double worst_opnorm = 0;     // ||op u|| vs ||u||
  double worst_mult = 0;       // ||f^eps (op u)|| vs rms(f) * ||u|| * (1 + allowance)
  double worst_commute = 0;    // ||D(op u) - op(Du)|| / ||Du||
  double worst_linearity = 0;  // relative defect of op(a u + b v)
  double worst_idem = 0;       // ||op(op u) - op u|| / ||u||, projection only
  long violations = 0;
};

/*! Runs the decay, operator-norm, oscillatory-multiplication, commutation,
 *  linearity and (for the projection) idempotence checks on every sample.
 *  `profile` is the scalar cell-periodic weight f of the multiplication
 *  bound ||f^eps (op u)|| <= rms(f) ||u||, evaluated as f(x / eps); pass
 *  `profile_rms` = sqrt of the cell mean of f^2 and a relative quadrature
 *  `mult_allowance` for the subcell midpoint rule.  A null profile skips
 *  that check.
 */
SmoothingSuite smoothingSuite(SmoothKind kind, const std::vector<Field>& samples,
                              const model::Lattice& lattice, double eps, double rate,
                              const std::function<double(const double*)>& profile,
                              double profile_rms, double mult_allowance);

}  // namespace homog::fem
