#pragma once

#include <array>
#include <memory>
#include <vector>

#include "core/la.hpp"

namespace homog::model {

/*! Periodic coefficient field on the unit cell, parametrized on [0,1)^d in
 *  fractional lattice coordinates.  Samples are symmetric positive definite
 *  m x m matrices; every shipped family is real (the API admits Hermitian
 *  values via atComplex for symmetry with the symbol layer).
 *
 *  Closed-form sup/inf norms are exact per family, not sampled.
 */
class Coefficient {
 public:
  enum class Family { Constant, Laminate, Checkerboard, Trig, Raster, Elasticity };

  static Coefficient constant(int dim, Mat value);
  // g = a on y1 in [0, fraction), b elsewhere, times identity
  static Coefficient laminate(int dim, int m, double a, double b, double fraction);
  // 2 x 2 subcell pattern, a on the subcell containing (1/4, 1/4)
  static Coefficient checkerboard(int m, double a, double b);
  // g = (base + sum_j amps_j cos(2 pi y_j)) * identity; needs base > sum |amps|
  static Coefficient trig(int dim, int m, double base, Vec amps);
  // piecewise constant on a dims-grid of subcells, row-major cells
  static Coefficient raster(int dim, std::array<long, 3> dims, std::vector<Mat> cells);
  // isotropic planar elasticity block (m = 3) scaled by a positive scalar
  // profile given as an m = 1 coefficient
  static Coefficient elasticity(double mu, double lambda,
                                std::shared_ptr<Coefficient> modulation = nullptr);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  int rows() const { return m_; }

  // true when g(y) = s(y) * I with scalar s; enables the fast assembly path
  bool scalarTimesIdentity() const { return scalar_identity_; }
  double scalarAt(const double* y) const;

  // wider fast-path test: g(y) = profileAt(y) * base with a fixed matrix base
  bool scalarProfile(Mat& base) const;
  double profileAt(const double* y) const;

  Mat at(const double* y) const;
  CMat atComplex(const double* y) const { return at(y).cast<std::complex<double>>(); }

  double normSup() const;     // ess sup of the pointwise operator norm
  double normInvSup() const;  // ess sup of |g^-1|
  double minEig() const;      // uniform positivity margin
  Mat meanValue() const;      // exact arithmetic mean over the cell
  Mat harmonicMeanValue() const;  // (mean of g^-1)^-1

  // does an N-per-axis element grid align with all material interfaces
  bool gridResolves(long N) const;

  // min over an N^d midpoint sample of the smallest eigenvalue (test support)
  double sampledMinEig(long N) const;

 private:
  Coefficient() = default;

  Family family_ = Family::Constant;
  int dim_ = 0, m_ = 0;
  bool scalar_identity_ = false;

  Mat value_;                  // Constant; Elasticity iso block
  double a_ = 0, b_ = 0, fraction_ = 0.5;
  double base_ = 0;
  Vec amps_;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<Mat> cells_;
  std::shared_ptr<Coefficient> modulation_;
};

}  // namespace homog::model
