#pragma once

#include <array>

#include "core/la.hpp"

namespace homog::model {

/*! Periodicity lattice generated by the columns of `basis`.
 *
 * The fundamental cell is centered: { sum_j tau_j a_j : tau_j in (-1/2, 1/2) }.
 * The dual basis satisfies <b_i, a_j> = 2 pi delta_ij.  Two radii describe the
 * cell geometry: r0 is half the shortest nonzero dual-lattice vector (so the
 * ball of radius r0/eps fits inside the scaled dual cell), r1 is half the cell
 * diameter (the reach of cell-averaging at scale eps is eps*r1).
 */
class Lattice {
 public:
  static Lattice cubic(int dim);
  static Lattice fromBasis(const Mat& basis);

  int dim() const { return dim_; }
  const Mat& basis() const { return basis_; }
  const Mat& dual() const { return dual_; }
  double cellVolume() const { return cell_volume_; }
  double r0() const { return r0_; }
  double r1() const { return r1_; }
  bool isCubic(double tol = 1e-14) const;

 private:
  Lattice() = default;
  void finish();

  int dim_ = 0;
  Mat basis_, dual_;
  double cell_volume_ = 0, r0_ = 0, r1_ = 0;
};

}  // namespace homog::model
