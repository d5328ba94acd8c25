#include "core/symbol.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace homog::model {

namespace {

double goldenRefine(const std::function<double(double)>& f, double a, double b,
                    bool maximize, int iters = 90) {
  // golden-section search on [a, b]; returns the extremal value
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    const bool pick_left = maximize ? (fc > fd) : (fc < fd);
    if (pick_left) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  return maximize ? std::max(fc, fd) : std::min(fc, fd);
}

}  // namespace

Symbol Symbol::gradient(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("symbol dim must be 1..3");
  std::vector<CMat> b(dim);
  for (int l = 0; l < dim; ++l) {
    b[l] = CMat::Zero(dim, 1);
    b[l](l, 0) = 1.0;
  }
  return custom(dim, std::move(b));
}

Symbol Symbol::elasticity2d() {
  const double s = 1.0 / std::sqrt(2.0);
  CMat b1 = CMat::Zero(3, 2), b2 = CMat::Zero(3, 2);
  b1(0, 0) = 1.0; b1(2, 1) = s;
  b2(1, 1) = 1.0; b2(2, 0) = s;
  return custom(2, {b1, b2});
}

Symbol Symbol::custom(int dim, std::vector<CMat> b) {
  if (static_cast<int>(b.size()) != dim) throw std::invalid_argument("need one b_l per axis");
  Symbol s;
  s.dim_ = dim;
  s.m_ = static_cast<int>(b[0].rows());
  s.n_ = static_cast<int>(b[0].cols());
  for (const auto& bl : b)
    if (bl.rows() != s.m_ || bl.cols() != s.n_)
      throw std::invalid_argument("all b_l must share one shape");
  if (s.m_ < s.n_) throw std::invalid_argument("symbol needs m >= n");
  s.b_ = std::move(b);
  return s;
}

CMat Symbol::at(const Vec& xi) const {
  CMat out = CMat::Zero(m_, n_);
  for (int l = 0; l < dim_; ++l) out += b_[l] * xi[l];
  return out;
}

bool Symbol::isReal(double tol) const {
  for (const auto& bl : b_)
    if (bl.imag().cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

double Symbol::maxCoeffNorm() const {
  double v = 0;
  for (const auto& bl : b_) v = std::max(v, operatorNorm(bl));
  return v;
}

Symbol::Bounds Symbol::ellipticityBounds() const {
  auto eigs = [&](const Vec& xi) {
    Eigen::SelfAdjointEigenSolver<CMat> es(at(xi).adjoint() * at(xi));
    return std::pair<double, double>{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
  };

  if (dim_ == 1) {
    auto [lo, hi] = eigs(Vec::Ones(1));
    if (lo <= 0) throw std::domain_error("symbol is rank-deficient");
    return {lo, hi};
  }

  if (dim_ == 2) {
    auto lo_at = [&](double phi) {
      Vec xi(2); xi << std::cos(phi), std::sin(phi);
      return eigs(xi).first;
    };
    auto hi_at = [&](double phi) {
      Vec xi(2); xi << std::cos(phi), std::sin(phi);
      return eigs(xi).second;
    };
    const int M = 4096;  // b(-xi)*b(-xi) = b(xi)*b(xi): half circle suffices
    double best_lo = std::numeric_limits<double>::infinity(), best_hi = 0;
    int i_lo = 0, i_hi = 0;
    for (int i = 0; i < M; ++i) {
      const double phi = M_PI * i / M;
      const double lo = lo_at(phi), hi = hi_at(phi);
      if (lo < best_lo) { best_lo = lo; i_lo = i; }
      if (hi > best_hi) { best_hi = hi; i_hi = i; }
    }
    const double dphi = M_PI / M;
    best_lo = goldenRefine(lo_at, (i_lo - 1) * dphi, (i_lo + 1) * dphi, false);
    best_hi = goldenRefine(hi_at, (i_hi - 1) * dphi, (i_hi + 1) * dphi, true);
    if (best_lo <= 0) throw std::domain_error("symbol is rank-deficient");
    return {best_lo, best_hi};
  }

  // d = 3: Fibonacci sphere sample, then pattern refinement around the extremes
  const int M = 16384;
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  Vec best_lo_xi(3), best_hi_xi(3);
  double best_lo = std::numeric_limits<double>::infinity(), best_hi = 0;
  for (int i = 0; i < M; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / M;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec xi(3); xi << r * std::cos(ga * i), r * std::sin(ga * i), z;
    auto [lo, hi] = eigs(xi);
    if (lo < best_lo) { best_lo = lo; best_lo_xi = xi; }
    if (hi > best_hi) { best_hi = hi; best_hi_xi = xi; }
  }
  auto refine = [&](Vec xi, bool maximize) {
    double val = maximize ? eigs(xi).second : eigs(xi).first;
    double step = 2.0 * M_PI / std::sqrt(static_cast<double>(M));
    for (int round = 0; round < 60; ++round) {
      bool improved = false;
      for (int a = 0; a < 3; ++a)
        for (double s : {-step, step}) {
          Vec cand = xi; cand[a] += s; cand.normalize();
          const auto e = eigs(cand);
          const double v = maximize ? e.second : e.first;
          if (maximize ? v > val : v < val) { val = v; xi = cand; improved = true; }
        }
      if (!improved) step *= 0.5;
      if (step < 1e-9) break;
    }
    return val;
  };
  best_lo = refine(best_lo_xi, false);
  best_hi = refine(best_hi_xi, true);
  if (best_lo <= 0) throw std::domain_error("symbol is rank-deficient");
  return {best_lo, best_hi};
}

Mat Symbol::realBlockRow() const {
  if (!isReal()) throw std::domain_error("symbol has complex entries");
  Mat out(m_, n_ * dim_);
  for (int l = 0; l < dim_; ++l) out.block(0, l * n_, m_, n_) = b_[l].real();
  return out;
}

}  // namespace homog::model
