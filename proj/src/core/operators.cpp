#include "core/operators.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace homog::fem {

namespace detail {

namespace {
// 1D factors on [0, h]: stiffness, dimensionless first-derivative moment
// D1[i][j] = int phi_i' phi_j, and mass
inline void factors1d(double h, double K[2][2], double D[2][2], double M[2][2]) {
  K[0][0] = K[1][1] = 1.0 / h;
  K[0][1] = K[1][0] = -1.0 / h;
  D[0][0] = D[0][1] = -0.5;
  D[1][0] = D[1][1] = 0.5;
  M[0][0] = M[1][1] = h / 3.0;
  M[0][1] = M[1][0] = h / 6.0;
}
}  // namespace

Mat localStiffnessAB(int dim, const double* h, int a, int b) {
  const int corners = 1 << dim;
  Mat out = Mat::Zero(corners, corners);
  double K[3][2][2], D[3][2][2], M[3][2][2];
  for (int j = 0; j < dim; ++j) factors1d(h[j], K[j], D[j], M[j]);
  for (int q = 0; q < corners; ++q)
    for (int p = 0; p < corners; ++p) {
      double v = 1;
      for (int j = 0; j < dim; ++j) {
        const int iq = (q >> j) & 1, ip = (p >> j) & 1;
        if (j == a && j == b)
          v *= K[j][iq][ip];
        else if (j == a)
          v *= D[j][iq][ip];
        else if (j == b)
          v *= D[j][ip][iq];
        else
          v *= M[j][iq][ip];
      }
      out(q, p) = v;
    }
  return out;
}

Mat localStiffness(int dim, const double* h, const Mat& C, int n) {
  const int corners = 1 << dim;
  Mat out = Mat::Zero(corners * n, corners * n);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const Mat kab = localStiffnessAB(dim, h, a, b);
      for (int c = 0; c < n; ++c)
        for (int cc = 0; cc < n; ++cc) {
          const double w = C(a * n + c, b * n + cc);
          if (w == 0) continue;
          for (int q = 0; q < corners; ++q)
            for (int p = 0; p < corners; ++p) out(q * n + c, p * n + cc) += w * kab(q, p);
        }
    }
  return out;
}

Mat localMass(int dim, const double* h) {
  const int corners = 1 << dim;
  Mat out = Mat::Zero(corners, corners);
  double K[3][2][2], D[3][2][2], M[3][2][2];
  for (int j = 0; j < dim; ++j) factors1d(h[j], K[j], D[j], M[j]);
  for (int q = 0; q < corners; ++q)
    for (int p = 0; p < corners; ++p) {
      double v = 1;
      for (int j = 0; j < dim; ++j) v *= M[j][(q >> j) & 1][(p >> j) & 1];
      out(q, p) = v;
    }
  return out;
}

}  // namespace detail

GaussRule::GaussRule(const Grid& g) {
  const int d = g.dim;
  npts = 1 << d;
  weight = 1;
  const double t[2] = {0.5 * (1 - 1 / std::sqrt(3.0)), 0.5 * (1 + 1 / std::sqrt(3.0))};
  for (int j = 0; j < d; ++j) {
    weight *= g.h[j] / 2;
    for (int k = 0; k < 2; ++k) {
      val[j][k][0] = 1 - t[k];
      val[j][k][1] = t[k];
      der[j][k][0] = -1 / g.h[j];
      der[j][k][1] = 1 / g.h[j];
    }
  }
  for (int k = 0; k < npts; ++k)
    for (int j = 0; j < 3; ++j) offset[k][j] = j < d ? t[(k >> j) & 1] * g.h[j] : 0.0;
}

Operator::Operator(const Grid& grid, const model::Symbol& symbol, const model::Coefficient& coef,
                   double eps, double sigma, BC bc)
    : grid_(grid), sym_(symbol), n_(symbol.cols()), sigma_(sigma), bc_(bc) {
  if (coef.rows() != symbol.rows())
    throw std::invalid_argument("coefficient rows must match symbol rows");
  if (!(eps > 0)) throw std::invalid_argument("scale eps must be positive");
  setup(&coef, eps);
}

Operator::Operator(const Grid& grid, const model::Symbol& symbol, Mat gconst, double sigma, BC bc)
    : grid_(grid), sym_(symbol), n_(symbol.cols()), sigma_(sigma), bc_(bc) {
  if (gconst.rows() != symbol.rows() || gconst.cols() != symbol.rows())
    throw std::invalid_argument("constant medium must be m x m");
  base_ = std::move(gconst);
  scalar_path_ = true;
  const Mat B = sym_.realBlockRow();
  C_ = B.transpose() * base_ * B;
  kfix_ = detail::localStiffness(grid_.dim, grid_.h.data(), C_, n_);
  mref_ = detail::localMass(grid_.dim, grid_.h.data());
  elem_scale_.assign(grid_.cellCount(), 1.0);
  if (bc_ == BC::Dirichlet0 && grid_.periodic)
    throw std::invalid_argument("Dirichlet boundary needs a box grid");
  boundary_.assign(grid_.nodeCount(), 0);
  if (!grid_.periodic) {
    const int d = grid_.dim;
    const long n1 = d > 1 ? grid_.nodesAxis(1) : 1;
    const long n2 = d > 2 ? grid_.nodesAxis(2) : 1;
    for (long i0 = 0; i0 < grid_.nodesAxis(0); ++i0)
      for (long i1 = 0; i1 < n1; ++i1)
        for (long i2 = 0; i2 < n2; ++i2) {
          bool bd = i0 == 0 || i0 == grid_.cells[0];
          if (d > 1) bd = bd || i1 == 0 || i1 == grid_.cells[1];
          if (d > 2) bd = bd || i2 == 0 || i2 == grid_.cells[2];
          if (bd) boundary_[(i0 * n1 + i1) * n2 + i2] = 1;
        }
  }
}

void Operator::setup(const model::Coefficient* coef, double eps) {
  if (bc_ == BC::Dirichlet0 && grid_.periodic)
    throw std::invalid_argument("Dirichlet boundary needs a box grid");
  const int d = grid_.dim;
  mref_ = detail::localMass(d, grid_.h.data());
  const Mat B = sym_.realBlockRow();
  scalar_path_ = coef->scalarProfile(base_);
  if (scalar_path_) {
    C_ = B.transpose() * base_ * B;
    kfix_ = detail::localStiffness(d, grid_.h.data(), C_, n_);
  } else {
    base_ = coef->meanValue();
    C_ = B.transpose() * base_ * B;
  }
  const long cells = grid_.cellCount();
  const long e1 = d > 1 ? grid_.cells[1] : 1;
  const long e2 = d > 2 ? grid_.cells[2] : 1;
  const int corners = 1 << d;
  const int L = corners * n_;
  if (scalar_path_)
    elem_scale_.resize(cells);
  else
    elem_form_.resize(cells * L * L);
  double y[3] = {0, 0, 0};
  long e = 0;
  for (long i0 = 0; i0 < grid_.cells[0]; ++i0)
    for (long i1 = 0; i1 < e1; ++i1)
      for (long i2 = 0; i2 < e2; ++i2, ++e) {
        const long idx[3] = {i0, i1, i2};
        for (int j = 0; j < d; ++j) y[j] = (grid_.nodeCoord(j, idx[j]) + 0.5 * grid_.h[j]) / eps;
        if (scalar_path_) {
          elem_scale_[e] = coef->profileAt(y);
        } else {
          const Mat ge = coef->at(y);
          const Mat Ce = B.transpose() * ge * B;
          const Mat loc = detail::localStiffness(d, grid_.h.data(), Ce, n_);
          std::memcpy(&elem_form_[e * L * L], loc.data(), sizeof(double) * L * L);
        }
      }
  boundary_.assign(grid_.nodeCount(), 0);
  if (!grid_.periodic) {
    const long n1 = d > 1 ? grid_.nodesAxis(1) : 1;
    const long n2 = d > 2 ? grid_.nodesAxis(2) : 1;
    for (long i0 = 0; i0 < grid_.nodesAxis(0); ++i0)
      for (long i1 = 0; i1 < n1; ++i1)
        for (long i2 = 0; i2 < n2; ++i2) {
          bool bd = i0 == 0 || i0 == grid_.cells[0];
          if (d > 1) bd = bd || i1 == 0 || i1 == grid_.cells[1];
          if (d > 2) bd = bd || i2 == 0 || i2 == grid_.cells[2];
          if (bd) boundary_[(i0 * n1 + i1) * n2 + i2] = 1;
        }
  }
}

namespace {

// enumerate elements; nodes[] gets the 2^d flattened corner ids
template <class Body>
void forEachElement(const Grid& g, Body&& body) {
  const int d = g.dim;
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  const long e1 = d > 1 ? g.cells[1] : 1;
  const long e2 = d > 2 ? g.cells[2] : 1;
  const int corners = 1 << d;
  long nodes[8];
  long e = 0;
  for (long i0 = 0; i0 < g.cells[0]; ++i0) {
    const long i0p = g.wrapNode(0, i0 + 1);
    for (long i1 = 0; i1 < e1; ++i1) {
      const long i1p = d > 1 ? g.wrapNode(1, i1 + 1) : 0;
      for (long i2 = 0; i2 < e2; ++i2, ++e) {
        const long i2p = d > 2 ? g.wrapNode(2, i2 + 1) : 0;
        for (int q = 0; q < corners; ++q) {
          const long a0 = (q & 1) ? i0p : i0;
          const long a1 = (q & 2) ? i1p : i1;
          const long a2 = (q & 4) ? i2p : i2;
          nodes[q] = (a0 * n1 + (d > 1 ? a1 : 0)) * n2 + (d > 2 ? a2 : 0);
        }
        body(e, nodes, corners);
      }
    }
  }
}

}  // namespace

void Operator::stiffnessLoop(const double* u, double* y) const {
  const int n = n_;
  const int L = (1 << grid_.dim) * n;
  const double* K = kfix_.data();  // column major L x L
  double uloc[64], yloc[64];
  if (scalar_path_) {
    const double* scale = elem_scale_.data();
    forEachElement(grid_, [&](long e, const long* nodes, int corners) {
      for (int q = 0; q < corners; ++q)
        for (int c = 0; c < n; ++c) uloc[q * n + c] = u[nodes[q] * n + c];
      const double s = scale[e];
      for (int i = 0; i < L; ++i) yloc[i] = 0;
      for (int j = 0; j < L; ++j) {
        const double uj = uloc[j];
        const double* col = K + j * L;
        for (int i = 0; i < L; ++i) yloc[i] += col[i] * uj;
      }
      for (int q = 0; q < corners; ++q)
        for (int c = 0; c < n; ++c) y[nodes[q] * n + c] += s * yloc[q * n + c];
    });
  } else {
    const double* forms = elem_form_.data();
    const long LL = static_cast<long>(L) * L;
    forEachElement(grid_, [&](long e, const long* nodes, int corners) {
      for (int q = 0; q < corners; ++q)
        for (int c = 0; c < n; ++c) uloc[q * n + c] = u[nodes[q] * n + c];
      const double* Ke = forms + e * LL;
      for (int i = 0; i < L; ++i) yloc[i] = 0;
      for (int j = 0; j < L; ++j) {
        const double uj = uloc[j];
        const double* col = Ke + j * L;
        for (int i = 0; i < L; ++i) yloc[i] += col[i] * uj;
      }
      for (int q = 0; q < corners; ++q)
        for (int c = 0; c < n; ++c) y[nodes[q] * n + c] += yloc[q * n + c];
    });
  }
}

void Operator::massLoop(const double* u, double* y) const {
  const int n = n_;
  const double* M = mref_.data();  // (2^d)^2 column major
  double uloc[64], yloc[64];
  forEachElement(grid_, [&](long, const long* nodes, int corners) {
    for (int q = 0; q < corners; ++q)
      for (int c = 0; c < n; ++c) uloc[q * n + c] = u[nodes[q] * n + c];
    for (int i = 0; i < corners * n; ++i) yloc[i] = 0;
    for (int p = 0; p < corners; ++p)
      for (int q = 0; q < corners; ++q) {
        const double w = M[p * corners + q];
        for (int c = 0; c < n; ++c) yloc[q * n + c] += w * uloc[p * n + c];
      }
    for (int q = 0; q < corners; ++q)
      for (int c = 0; c < n; ++c) y[nodes[q] * n + c] += yloc[q * n + c];
  });
}

void Operator::applyRaw(const double* u, double* y) const {
  const long N = dof();
  std::memset(y, 0, sizeof(double) * N);
  stiffnessLoop(u, y);
  if (sigma_ != 0) {
    std::vector<double> tmp(N, 0.0);
    massLoop(u, tmp.data());
    for (long i = 0; i < N; ++i) y[i] += sigma_ * tmp[i];
  }
}

void Operator::apply(const double* u, double* y) const {
  applyRaw(u, y);
  if (bc_ == BC::Dirichlet0) {
    const long nodes = grid_.nodeCount();
    for (long i = 0; i < nodes; ++i)
      if (boundary_[i])
        for (int c = 0; c < n_; ++c) y[i * n_ + c] = u[i * n_ + c];
  }
}

void Operator::massApply(const double* u, double* y) const {
  std::memset(y, 0, sizeof(double) * dof());
  massLoop(u, y);
}

std::vector<double> Operator::diagonal() const {
  const int n = n_;
  const int L = (1 << grid_.dim) * n;
  std::vector<double> diag(dof(), 0.0);
  const double* K = kfix_.data();
  const double* M = mref_.data();
  const int corners = 1 << grid_.dim;
  forEachElement(grid_, [&](long e, const long* nodes, int) {
    for (int q = 0; q < corners; ++q)
      for (int c = 0; c < n; ++c) {
        const int i = q * n + c;
        double v = scalar_path_ ? elem_scale_[e] * K[i * L + i]
                                : elem_form_[e * static_cast<long>(L) * L + i * L + i];
        if (sigma_ != 0) v += sigma_ * M[q * corners + q];
        diag[nodes[q] * n + c] += v;
      }
  });
  if (bc_ == BC::Dirichlet0) {
    const long nodes = grid_.nodeCount();
    for (long i = 0; i < nodes; ++i)
      if (boundary_[i])
        for (int c = 0; c < n; ++c) diag[i * n + c] = 1.0;
  }
  return diag;
}

Field assembleLoad(const Grid& grid, int ncomp,
                   const std::function<void(const double*, double*)>& F) {
  Field rhs(grid, ncomp);
  const GaussRule rule(grid);
  const int d = grid.dim;
  const int corners = 1 << d;
  double x[3] = {0, 0, 0};
  std::vector<double> fv(ncomp);
  const long n1 = d > 1 ? grid.nodesAxis(1) : 1;
  const long n2 = d > 2 ? grid.nodesAxis(2) : 1;
  const long e1 = d > 1 ? grid.cells[1] : 1;
  const long e2 = d > 2 ? grid.cells[2] : 1;
  for (long i0 = 0; i0 < grid.cells[0]; ++i0)
    for (long i1 = 0; i1 < e1; ++i1)
      for (long i2 = 0; i2 < e2; ++i2) {
        const long e[3] = {i0, i1, i2};
        long nodes[8];
        for (int q = 0; q < corners; ++q) {
          long idx[3];
          for (int j = 0; j < d; ++j) idx[j] = grid.wrapNode(j, e[j] + ((q >> j) & 1));
          nodes[q] = (idx[0] * n1 + (d > 1 ? idx[1] : 0)) * n2 + (d > 2 ? idx[2] : 0);
        }
        for (int k = 0; k < rule.npts; ++k) {
          for (int j = 0; j < d; ++j) x[j] = grid.nodeCoord(j, e[j]) + rule.offset[k][j];
          F(x, fv.data());
          for (int q = 0; q < corners; ++q) {
            double w = rule.weight;
            for (int j = 0; j < d; ++j) w *= rule.val[j][(k >> j) & 1][(q >> j) & 1];
            for (int c = 0; c < ncomp; ++c) rhs.at(nodes[q], c) += w * fv[c];
          }
        }
      }
  return rhs;
}

}  // namespace homog::fem
