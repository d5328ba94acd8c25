#include "core/coefficient.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog::model {

namespace {
inline double wrap01(double t) {
  double f = t - std::floor(t);
  return f < 1.0 ? f : 0.0;
}
}  // namespace

Coefficient Coefficient::constant(int dim, Mat value) {
  if (value.rows() != value.cols()) throw std::invalid_argument("constant coefficient must be square");
  if ((value - value.transpose()).cwiseAbs().maxCoeff() > 1e-12 * value.cwiseAbs().maxCoeff())
    throw std::invalid_argument("coefficient must be symmetric");
  if (minEigSym(value) <= 0) throw std::invalid_argument("coefficient must be positive definite");
  Coefficient c;
  c.family_ = Family::Constant;
  c.dim_ = dim;
  c.m_ = static_cast<int>(value.rows());
  c.value_ = std::move(value);
  c.scalar_identity_ =
      (c.value_ - c.value_(0, 0) * Mat::Identity(c.m_, c.m_)).cwiseAbs().maxCoeff() == 0.0;
  c.a_ = c.b_ = c.value_(0, 0);
  return c;
}

Coefficient Coefficient::laminate(int dim, int m, double a, double b, double fraction) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("laminate phases must be positive");
  if (!(fraction > 0 && fraction < 1)) throw std::invalid_argument("laminate fraction in (0,1)");
  Coefficient c;
  c.family_ = Family::Laminate;
  c.dim_ = dim;
  c.m_ = m;
  c.a_ = a; c.b_ = b; c.fraction_ = fraction;
  c.scalar_identity_ = true;
  return c;
}

Coefficient Coefficient::checkerboard(int m, double a, double b) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("checkerboard phases must be positive");
  Coefficient c;
  c.family_ = Family::Checkerboard;
  c.dim_ = 2;
  c.m_ = m;
  c.a_ = a; c.b_ = b;
  c.scalar_identity_ = true;
  return c;
}

Coefficient Coefficient::trig(int dim, int m, double base, Vec amps) {
  if (amps.size() != dim) throw std::invalid_argument("trig needs one amplitude per axis");
  if (base - amps.cwiseAbs().sum() <= 0)
    throw std::invalid_argument("trig profile loses positivity");
  Coefficient c;
  c.family_ = Family::Trig;
  c.dim_ = dim;
  c.m_ = m;
  c.base_ = base;
  c.amps_ = std::move(amps);
  c.scalar_identity_ = true;
  return c;
}

Coefficient Coefficient::raster(int dim, std::array<long, 3> dims, std::vector<Mat> cells) {
  long total = 1;
  for (int j = 0; j < dim; ++j) {
    if (dims[j] < 1) throw std::invalid_argument("raster dims must be positive");
    total *= dims[j];
  }
  if (static_cast<long>(cells.size()) != total)
    throw std::invalid_argument("raster cell count mismatch");
  Coefficient c;
  c.family_ = Family::Raster;
  c.dim_ = dim;
  c.m_ = static_cast<int>(cells[0].rows());
  for (const auto& g : cells) {
    if (g.rows() != c.m_ || g.cols() != c.m_) throw std::invalid_argument("raster blocks must share shape");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("raster blocks must be symmetric");
    if (minEigSym(g) <= 0) throw std::invalid_argument("raster blocks must be positive definite");
  }
  c.dims_ = dims;
  c.cells_ = std::move(cells);
  c.scalar_identity_ = false;
  return c;
}

Coefficient Coefficient::elasticity(double mu, double lambda,
                                    std::shared_ptr<Coefficient> modulation) {
  if (mu <= 0 || lambda <= -mu)
    throw std::invalid_argument("elasticity moduli must satisfy mu > 0, lambda > -mu");
  Mat iso = Mat::Zero(3, 3);
  iso(0, 0) = iso(1, 1) = 2 * mu + lambda;
  iso(0, 1) = iso(1, 0) = lambda;
  iso(2, 2) = 2 * mu;
  if (modulation) {
    if (modulation->rows() != 1 || modulation->dim() != 2)
      throw std::invalid_argument("elasticity modulation must be a scalar planar field");
    if (modulation->minEig() <= 0)
      throw std::invalid_argument("elasticity modulation must stay positive");
  }
  Coefficient c;
  c.family_ = Family::Elasticity;
  c.dim_ = 2;
  c.m_ = 3;
  c.value_ = std::move(iso);
  c.modulation_ = std::move(modulation);
  c.scalar_identity_ = false;
  return c;
}

double Coefficient::scalarAt(const double* y) const {
  switch (family_) {
    case Family::Constant:
      if (!scalar_identity_) break;
      return a_;
    case Family::Laminate:
      return wrap01(y[0]) < fraction_ ? a_ : b_;
    case Family::Checkerboard: {
      const long p = static_cast<long>(std::floor(2 * wrap01(y[0]))) +
                     static_cast<long>(std::floor(2 * wrap01(y[1])));
      return (p % 2 == 0) ? a_ : b_;
    }
    case Family::Trig: {
      double v = base_;
      for (int j = 0; j < dim_; ++j) v += amps_[j] * std::cos(2 * M_PI * y[j]);
      return v;
    }
    default:
      break;
  }
  throw std::domain_error("coefficient is not scalar times identity");
}

bool Coefficient::scalarProfile(Mat& base) const {
  switch (family_) {
    case Family::Constant:
    case Family::Elasticity:
      base = value_;
      return true;
    case Family::Laminate:
    case Family::Checkerboard:
    case Family::Trig:
      base = Mat::Identity(m_, m_);
      return true;
    case Family::Raster:
      return false;
  }
  return false;
}

double Coefficient::profileAt(const double* y) const {
  switch (family_) {
    case Family::Constant:
      return 1.0;
    case Family::Elasticity:
      return modulation_ ? modulation_->scalarAt(y) : 1.0;
    default:
      return scalarAt(y);
  }
}

Mat Coefficient::at(const double* y) const {
  switch (family_) {
    case Family::Constant:
      return value_;
    case Family::Laminate:
    case Family::Checkerboard:
    case Family::Trig:
      return scalarAt(y) * Mat::Identity(m_, m_);
    case Family::Raster: {
      long idx = 0;
      for (int j = 0; j < dim_; ++j) {
        long i = static_cast<long>(std::floor(wrap01(y[j]) * dims_[j]));
        if (i >= dims_[j]) i = dims_[j] - 1;
        idx = idx * dims_[j] + i;
      }
      return cells_[idx];
    }
    case Family::Elasticity: {
      const double s = modulation_ ? modulation_->scalarAt(y) : 1.0;
      return s * value_;
    }
  }
  throw std::logic_error("unreachable");
}

double Coefficient::normSup() const {
  switch (family_) {
    case Family::Constant: return maxEigSym(value_);
    case Family::Laminate:
    case Family::Checkerboard: return std::max(a_, b_);
    case Family::Trig: return base_ + amps_.cwiseAbs().sum();
    case Family::Raster: {
      double v = 0;
      for (const auto& g : cells_) v = std::max(v, maxEigSym(g));
      return v;
    }
    case Family::Elasticity:
      return (modulation_ ? modulation_->normSup() : 1.0) * maxEigSym(value_);
  }
  throw std::logic_error("unreachable");
}

double Coefficient::normInvSup() const {
  switch (family_) {
    case Family::Constant: return 1.0 / minEigSym(value_);
    case Family::Laminate:
    case Family::Checkerboard: return 1.0 / std::min(a_, b_);
    case Family::Trig: return 1.0 / (base_ - amps_.cwiseAbs().sum());
    case Family::Raster: {
      double v = 0;
      for (const auto& g : cells_) v = std::max(v, 1.0 / minEigSym(g));
      return v;
    }
    case Family::Elasticity:
      return (modulation_ ? modulation_->normInvSup() : 1.0) / minEigSym(value_);
  }
  throw std::logic_error("unreachable");
}

double Coefficient::minEig() const { return 1.0 / normInvSup(); }

Mat Coefficient::meanValue() const {
  switch (family_) {
    case Family::Constant: return value_;
    case Family::Laminate:
      return (fraction_ * a_ + (1 - fraction_) * b_) * Mat::Identity(m_, m_);
    case Family::Checkerboard:
      return 0.5 * (a_ + b_) * Mat::Identity(m_, m_);
    case Family::Trig:
      return base_ * Mat::Identity(m_, m_);
    case Family::Raster: {
      Mat s = Mat::Zero(m_, m_);
      for (const auto& g : cells_) s += g;
      return s / static_cast<double>(cells_.size());
    }
    case Family::Elasticity: {
      const double s = modulation_ ? modulation_->meanValue()(0, 0) : 1.0;
      return s * value_;
    }
  }
  throw std::logic_error("unreachable");
}

Mat Coefficient::harmonicMeanValue() const {
  switch (family_) {
    case Family::Constant: return value_;
    case Family::Laminate:
      return 1.0 / (fraction_ / a_ + (1 - fraction_) / b_) * Mat::Identity(m_, m_);
    case Family::Checkerboard:
      return 2.0 / (1.0 / a_ + 1.0 / b_) * Mat::Identity(m_, m_);
    case Family::Trig: {
      // mean of 1/(base + sum amps_j cos) factorizes only in 1D; elsewhere sample
      if (dim_ == 1) {
        const double r = std::sqrt(base_ * base_ - amps_[0] * amps_[0]);
        return r * Mat::Identity(m_, m_);
      }
      const long N = 4096;
      double acc = 0;
      std::array<double, 3> y{0, 0, 0};
      if (dim_ == 2) {
        for (long i = 0; i < N; ++i)
          for (long j = 0; j < N; ++j) {
            y[0] = (i + 0.5) / N; y[1] = (j + 0.5) / N;
            acc += 1.0 / scalarAt(y.data());
          }
        acc /= double(N) * double(N);
      } else {
        throw std::domain_error("trig harmonic mean implemented for d <= 2");
      }
      return (1.0 / acc) * Mat::Identity(m_, m_);
    }
    case Family::Raster: {
      Mat s = Mat::Zero(m_, m_);
      for (const auto& g : cells_) s += g.inverse();
      s /= static_cast<double>(cells_.size());
      return s.inverse();
    }
    case Family::Elasticity: {
      double s = 1.0;
      if (modulation_) s = 1.0 / modulation_->harmonicMeanValue()(0, 0);
      return (1.0 / s) * value_;
    }
  }
  throw std::logic_error("unreachable");
}

bool Coefficient::gridResolves(long N) const {
  auto integral = [](double t) { return std::abs(t - std::round(t)) < 1e-9; };
  switch (family_) {
    case Family::Constant:
    case Family::Trig: return true;
    case Family::Laminate: return integral(fraction_ * N);
    case Family::Checkerboard: return N % 2 == 0;
    case Family::Raster: {
      for (int j = 0; j < dim_; ++j)
        if (N % dims_[j] != 0) return false;
      return true;
    }
    case Family::Elasticity:
      return modulation_ ? modulation_->gridResolves(N) : true;
  }
  return false;
}

double Coefficient::sampledMinEig(long N) const {
  double v = std::numeric_limits<double>::infinity();
  std::array<double, 3> y{0, 0, 0};
  std::array<long, 3> idx{0, 0, 0};
  const long n1 = dim_ > 1 ? N : 1, n2 = dim_ > 2 ? N : 1;
  for (idx[0] = 0; idx[0] < N; ++idx[0])
    for (idx[1] = 0; idx[1] < n1; ++idx[1])
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        for (int j = 0; j < dim_; ++j) y[j] = (idx[j] + 0.5) / (j == 0 ? N : (j == 1 ? n1 : n2));
        v = std::min(v, scalar_identity_ ? scalarAt(y.data()) : minEigSym(at(y.data())));
      }
  return v;
}

}  // namespace homog::model
