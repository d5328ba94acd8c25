#pragma once

#include <Eigen/Dense>
#include <complex>

namespace homog {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// largest singular value
inline double operatorNorm(const CMat& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::SelfAdjointEigenSolver<CMat> es(a.adjoint() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double operatorNorm(const Mat& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::SelfAdjointEigenSolver<Mat> es(a.transpose() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double minEigSym(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvalues().minCoeff();
}

inline double maxEigSym(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvalues().maxCoeff();
}

}  // namespace homog
