#include "core/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace homog::model {

Lattice Lattice::cubic(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("lattice dim must be 1..3");
  Lattice l;
  l.dim_ = dim;
  l.basis_ = Mat::Identity(dim, dim);
  l.finish();
  return l;
}

Lattice Lattice::fromBasis(const Mat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() < 1 || basis.rows() > 3)
    throw std::invalid_argument("lattice basis must be square, dim 1..3");
  Lattice l;
  l.dim_ = static_cast<int>(basis.rows());
  l.basis_ = basis;
  l.finish();
  return l;
}

void Lattice::finish() {
  cell_volume_ = std::abs(basis_.determinant());
  if (!(cell_volume_ > 0)) throw std::invalid_argument("lattice basis is singular");
  dual_ = 2.0 * M_PI * basis_.inverse().transpose();

  // shortest nonzero dual vector over a bounded coefficient range; the range
  // is generous enough for any non-degenerate basis used here
  const int R = 5;
  double min_dual = std::numeric_limits<double>::infinity();
  std::array<int, 3> k{0, 0, 0};
  const int lo = -R, hi = R;
  for (k[0] = (dim_ > 0 ? lo : 0); k[0] <= (dim_ > 0 ? hi : 0); ++k[0])
    for (k[1] = (dim_ > 1 ? lo : 0); k[1] <= (dim_ > 1 ? hi : 0); ++k[1])
      for (k[2] = (dim_ > 2 ? lo : 0); k[2] <= (dim_ > 2 ? hi : 0); ++k[2]) {
        if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
        Vec v = Vec::Zero(dim_);
        for (int j = 0; j < dim_; ++j) v += k[j] * dual_.col(j);
        min_dual = std::min(min_dual, v.norm());
      }
  r0_ = 0.5 * min_dual;

  // half the cell diameter: farthest vertex pair of the centered cell
  double diam = 0;
  const int corners = 1 << dim_;
  for (int s = 0; s < corners; ++s) {
    Vec v = Vec::Zero(dim_);
    for (int j = 0; j < dim_; ++j) v += ((s >> j) & 1 ? 1.0 : -1.0) * basis_.col(j);
    diam = std::max(diam, v.norm());
  }
  r1_ = 0.5 * diam;
}

bool Lattice::isCubic(double tol) const {
  return (basis_ - Mat::Identity(dim_, dim_)).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace homog::model
