#pragma once

#include <string>
#include <vector>

#include "core/la.hpp"

namespace homog::model {

/*! First-order matrix symbol b(xi) = sum_l b_l xi_l with m x n coefficient
 *  matrices b_l.  Admissible symbols have full column rank off xi = 0, i.e.
 *  alpha0 |xi|^2 <= eig(b(xi)* b(xi)) <= alpha1 |xi|^2 with alpha0 > 0.
 */
class Symbol {
 public:
  struct Bounds {
    double alpha0 = 0;  // min over the unit sphere of the smallest eigenvalue
    double alpha1 = 0;  // max over the unit sphere of the largest eigenvalue
  };

  // b(D) = D: m = d, n = 1
  static Symbol gradient(int dim);
  // planar symmetrized-gradient factorization: n = 2, m = 3,
  // rows (xi1, 0), (0, xi2), (xi2, xi1)/sqrt(2)
  static Symbol elasticity2d();
  static Symbol custom(int dim, std::vector<CMat> b);

  int dim() const { return dim_; }
  int rows() const { return m_; }   // m
  int cols() const { return n_; }   // n
  const CMat& coeff(int l) const { return b_[l]; }

  CMat at(const Vec& xi) const;
  bool isReal(double tol = 0.0) const;

  // max_l |b_l| in operator norm; always <= sqrt(alpha1)
  double maxCoeffNorm() const;

  /*! Ellipticity constants by dense sphere sampling plus local refinement.
   *  d = 1 is exact; d = 2 refines bracketed extrema to ~1e-12 in angle;
   *  d = 3 uses a quasi-uniform sample with pattern refinement. */
  Bounds ellipticityBounds() const;

  // [b_1 ... b_d] as one real m x (n*d) block row; requires isReal()
  Mat realBlockRow() const;

 private:
  int dim_ = 0, m_ = 0, n_ = 0;
  std::vector<CMat> b_;
};

}  // namespace homog::model
