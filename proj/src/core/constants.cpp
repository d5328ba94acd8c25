#include "core/constants.hpp"

#include <cmath>

namespace homog::model {

Constants makeConstants(const Lattice& lattice, const Symbol& symbol,
                        const Symbol::Bounds& bounds, const Coefficient& coefficient,
                        std::optional<double> domain_diam) {
  Constants c;
  c.dim = lattice.dim();
  c.m = symbol.rows();
  c.alpha0 = bounds.alpha0;
  c.alpha1 = bounds.alpha1;
  c.g_sup = coefficient.normSup();
  c.ginv_sup = coefficient.normInvSup();
  c.r0 = lattice.r0();
  c.r1 = lattice.r1();
  c.cell_volume = lattice.cellVolume();

  c.coercivity = c.alpha0 / c.ginv_sup;
  c.boundedness = c.alpha1 * c.g_sup;

  const double d = c.dim;
  const double contrast = c.ginv_sup * c.g_sup;
  c.weight_abs = 16.0 * c.m / c.alpha0 * contrast;
  c.weight_grad = 2.0 * (1.0 + 2.0 * d * c.alpha1 / c.alpha0 +
                         20.0 * d * c.alpha1 / c.alpha0 * contrast);

  const double gain = std::sqrt(c.m) / (2.0 * c.r0) * std::sqrt(contrast / c.alpha0);
  c.smoothing_gain = gain;
  c.corrector_l2_bound = std::sqrt(c.cell_volume) * gain;
  c.corrector_grad_l2_bound =
      std::sqrt(c.cell_volume * c.m * contrast / c.alpha0);

  c.hom_h2_factor = 1.0 + 1.0 / c.coercivity;

  if (domain_diam) {
    c.has_domain = true;
    c.domain_diam = *domain_diam;
    c.energy_bound = (1.0 + c.domain_diam * c.domain_diam) * c.ginv_sup / c.alpha0;
    c.discrepancy_gain = 1.0 + c.energy_bound * std::sqrt(d) * c.alpha1 * c.g_sup;
  }
  return c;
}

}  // namespace homog::model
