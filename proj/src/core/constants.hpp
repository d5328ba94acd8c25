#pragma once

#include <optional>

#include "core/coefficient.hpp"
#include "core/lattice.hpp"
#include "core/symbol.hpp"

namespace homog::model {

/*! Closed-form constants attached to a problem instance.  Every entry is an
 *  a-priori bound computable from the symbol's ellipticity constants, the
 *  coefficient's sup/inf norms and the cell geometry alone; diagnostics
 *  measure observed quantities against these.
 */
struct Constants {
  int dim = 0, m = 0;
  double alpha0 = 0, alpha1 = 0;
  double g_sup = 0, ginv_sup = 0;
  double r0 = 0, r1 = 0, cell_volume = 0;

  double coercivity = 0;    // alpha0 / ginv_sup: lower spectral-equivalence weight
  double boundedness = 0;   // alpha1 * g_sup: upper spectral-equivalence weight

  // weights of the oscillatory-weight inequality
  //   int |(D Lambda)^eps|^2 |u|^2 <= weight_abs ||u||^2
  //                                   + weight_grad eps^2 int |Lambda^eps|^2 |Du|^2
  double weight_abs = 0;
  double weight_grad = 0;

  // cell-corrector norm bounds, already scaled by |cell|^(1/2)
  double corrector_l2_bound = 0;
  double corrector_grad_l2_bound = 0;

  // gain of corrector-times-smoothing compositions per unit cell volume
  double smoothing_gain = 0;

  // second-order a-priori factor for the constant-coefficient solve
  double hom_h2_factor = 0;

  // bounded-domain entries; populated when a domain diameter is supplied
  double domain_diam = 0;
  double energy_bound = 0;      // H1-solution bound per unit forcing
  double discrepancy_gain = 0;  // amplification of boundary-corrector energy

  bool has_domain = false;
};

Constants makeConstants(const Lattice& lattice, const Symbol& symbol,
                        const Symbol::Bounds& bounds, const Coefficient& coefficient,
                        std::optional<double> domain_diam = std::nullopt);

}  // namespace homog::model
