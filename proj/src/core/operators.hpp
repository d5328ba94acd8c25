#pragma once

#include <functional>
#include <vector>

#include "core/coefficient.hpp"
#include "core/la.hpp"
#include "core/mesh.hpp"
#include "core/symbol.hpp"

namespace homog::fem {

enum class BC { Periodic, Dirichlet0 };

namespace detail {
// local Q1 matrices on [0,h_0] x ... ; corner q uses bit j for axis j, local
// dof index = q * n + c.  C is the (n d) x (n d) gradient form B^T g B with
// column order axis-major (a * n + c).
Mat localStiffness(int dim, const double* h, const Mat& C, int n);
Mat localMass(int dim, const double* h);
// single (test-deriv a, trial-deriv b) block, n = 1
Mat localStiffnessAB(int dim, const double* h, int a, int b);
}  // namespace detail

/*! Matrix-free Q1 discretization of u -> b(D)* g(x / eps) b(D) u + sigma u
 *  with consistent mass.  The coefficient is sampled once per element at the
 *  midpoint, so grids that resolve the material interfaces integrate it
 *  exactly.  Dirichlet0 replaces boundary rows of apply() by identity.
 */
class Operator {
 public:
  Operator(const Grid& grid, const model::Symbol& symbol, const model::Coefficient& coef,
           double eps, double sigma, BC bc);
  Operator(const Grid& grid, const model::Symbol& symbol, Mat gconst, double sigma, BC bc);

  const Grid& grid() const { return grid_; }
  int ncomp() const { return n_; }
  double sigma() const { return sigma_; }
  BC bc() const { return bc_; }
  long dof() const { return grid_.nodeCount() * n_; }

  void apply(const double* u, double* y) const;
  void applyRaw(const double* u, double* y) const;  // no boundary-row replacement
  void massApply(const double* u, double* y) const;
  std::vector<double> diagonal() const;

  // scalar path: g_e = scale_e * base for every element
  bool scalarPath() const { return scalar_path_; }
  const std::vector<double>& elementScale() const { return elem_scale_; }
  const Mat& baseMatrix() const { return base_; }
  const Mat& gradientForm() const { return C_; }  // B^T base B
  const model::Symbol& symbol() const { return sym_; }
  const std::vector<unsigned char>& boundaryMask() const { return boundary_; }

 private:
  void setup(const model::Coefficient* coef, double eps);
  void stiffnessLoop(const double* u, double* y) const;
  void massLoop(const double* u, double* y) const;

  Grid grid_;
  model::Symbol sym_;
  int n_ = 1;
  double sigma_ = 0;
  BC bc_ = BC::Periodic;
  bool scalar_path_ = true;
  Mat base_;                        // constant factor of the coefficient
  Mat C_;                           // B^T base B
  Mat kfix_;                        // local stiffness for base, scaled per element
  Mat mref_;                        // local mass (per component)
  std::vector<double> elem_scale_;  // scalar path
  std::vector<double> elem_form_;   // generic path, (n d)^2 per element
  std::vector<unsigned char> boundary_;
};

// load vector: rhs_i = int F phi_i by 2-point Gauss per axis; F fills ncomp values
Field assembleLoad(const Grid& grid, int ncomp,
                   const std::function<void(const double*, double*)>& F);

// tensor Gauss points of one element, 2 per axis: fills x[dim] and weights
struct GaussRule {
  explicit GaussRule(const Grid& g);
  int npts;                 // 2^dim
  double weight;            // same at every point: prod h_j / 2^dim
  double offset[8][3];      // point offsets from the element corner
  double val[3][2][2];      // [axis][gauss][node] basis values
  double der[3][2][2];      // [axis][gauss][node] basis derivatives
};

/*! Visits every tensor Gauss point of every element and passes the physical
 *  coordinates, the quadrature weight, and the symbol-gradient values
 *  G = b(D)u there (m entries).  fn(x, w, G).
 */
template <class Fn>
void forEachFluxPoint(const Field& u, const model::Symbol& sym, Fn&& fn) {
  const Grid& g = u.grid;
  const int d = g.dim, n = u.ncomp, m = sym.rows();
  const Mat B = sym.realBlockRow();
  const GaussRule rule(g);
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  const int corners = 1 << d;
  const long ec[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  std::vector<double> Du(n * d), G(m);
  double x[3] = {0, 0, 0};
  for (long e0 = 0; e0 < ec[0]; ++e0)
    for (long e1 = 0; e1 < ec[1]; ++e1)
      for (long e2 = 0; e2 < ec[2]; ++e2) {
        long nodes[8];
        const long e[3] = {e0, e1, e2};
        for (int q = 0; q < corners; ++q) {
          long idx[3];
          for (int j = 0; j < d; ++j) idx[j] = g.wrapNode(j, e[j] + ((q >> j) & 1));
          nodes[q] = (idx[0] * n1 + (d > 1 ? idx[1] : 0)) * n2 + (d > 2 ? idx[2] : 0);
        }
        for (int k = 0; k < rule.npts; ++k) {
          for (int j = 0; j < d; ++j) x[j] = g.nodeCoord(j, e[j]) + rule.offset[k][j];
          std::fill(Du.begin(), Du.end(), 0.0);
          for (int q = 0; q < corners; ++q)
            for (int c = 0; c < n; ++c) {
              const double uv = u.at(nodes[q], c);
              for (int a = 0; a < d; ++a) {
                double w = 1;
                for (int j = 0; j < d; ++j) {
                  const int gi = (k >> j) & 1, ni = (q >> j) & 1;
                  w *= (j == a) ? rule.der[j][gi][ni] : rule.val[j][gi][ni];
                }
                Du[a * n + c] += w * uv;
              }
            }
          for (int mm = 0; mm < m; ++mm) {
            double s = 0;
            for (int t = 0; t < n * d; ++t) s += B(mm, t) * Du[t];
            G[mm] = s;
          }
          fn(x, rule.weight, G.data());
        }
      }
}

}  // namespace homog::fem
