#include "core/dirichlet.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "core/extension.hpp"
#include "core/norms.hpp"
#include "core/operators.hpp"
#include "core/smoothing.hpp"
#include "core/wholespace.hpp"

namespace homog {

using fem::Field;
using fem::Grid;

Grid unitBox(int dim, long cells) {
  return Grid::box(dim, {cells, cells, cells}, {1, 1, 1});
}

namespace {

void defaultForcing(int dim, const double* x, double* out) {
  double v = dim * M_PI * M_PI;
  for (int j = 0; j < dim; ++j) v *= std::sin(M_PI * x[j]);
  out[0] = v;
}

Field nodalField(const Grid& g, int ncomp,
                 const std::function<void(const double*, double*)>& fn) {
  Field F(g, ncomp);
  const int d = g.dim;
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  std::vector<double> vals(ncomp);
  double x[3] = {0, 0, 0};
  for (long i0 = 0; i0 < g.nodesAxis(0); ++i0)
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        const long idx[3] = {i0, i1, i2};
        for (int j = 0; j < d; ++j) x[j] = g.nodeCoord(j, idx[j]);
        fn(x, vals.data());
        for (int c = 0; c < ncomp; ++c) F.at((i0 * n1 + i1) * n2 + i2, c) = vals[c];
      }
  return F;
}

// Dirichlet solve with the consistent-mass load of the nodal forcing
Field solveWithLoad(const fem::Operator& A, const Field& Fnod,
                    const fem::SolveOptions& opts, long& iters) {
  std::vector<double> rhs(Fnod.data.size());
  A.massApply(Fnod.data.data(), rhs.data());
  std::vector<double> x;
  iters += fem::solve(A, rhs, x, opts).iterations;
  Field u(A.grid(), A.ncomp());
  u.data = std::move(x);
  return u;
}

void assertEnergyBound(const Field& u, double fnorm, double bound, const char* what) {
  const double lhs = fem::normH1(u);
  if (lhs > bound * fnorm * (1.0 + 1e-10) + 1e-12) {
    std::ostringstream os;
    os << what << " breaks the a-priori energy bound: |u|_H1 = " << lhs << " vs " << bound
       << " * " << fnorm;
    throw std::runtime_error(os.str());
  }
}

// copies the sub-box of a padded field that corresponds to the original grid
Field restrictPadded(const Field& ext, const Grid& original, long pad) {
  const int d = original.dim;
  Field out(original, ext.ncomp);
  const Grid& ge = ext.grid;
  const long e1 = d > 1 ? ge.nodesAxis(1) : 1;
  const long e2 = d > 2 ? ge.nodesAxis(2) : 1;
  const long n1 = d > 1 ? original.nodesAxis(1) : 1;
  const long n2 = d > 2 ? original.nodesAxis(2) : 1;
  for (long i0 = 0; i0 < original.nodesAxis(0); ++i0)
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        const long src = ((i0 + pad) * e1 + (d > 1 ? i1 + pad : 0)) * e2 +
                         (d > 2 ? i2 + pad : 0);
        const long dst = (i0 * n1 + i1) * n2 + i2;
        for (int c = 0; c < ext.ncomp; ++c) out.at(dst, c) = ext.at(src, c);
      }
  return out;
}

// S_eps of the extended corrector data at the nodes of a target grid
Field sampleSmoothed(const Field& Wext, const Grid& target, double eps) {
  const int d = target.dim;
  fem::SteklovSampler st(d, eps);
  Field S(target, Wext.ncomp);
  const long n1 = d > 1 ? target.nodesAxis(1) : 1;
  const long n2 = d > 2 ? target.nodesAxis(2) : 1;
  double x[3] = {0, 0, 0};
  for (long i0 = 0; i0 < target.nodesAxis(0); ++i0)
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        const long idx[3] = {i0, i1, i2};
        for (int j = 0; j < d; ++j) x[j] = target.nodeCoord(j, idx[j]);
        const long node = (i0 * n1 + i1) * n2 + i2;
        for (int r = 0; r < Wext.ncomp; ++r) S.at(node, r) = st.sampleField(Wext, r, x);
      }
  return S;
}

double ladderOrder(const Field& ucoarse, const Field& umid, const Field& ufine) {
  // self-convergence order from three nested solutions restricted to the
  // coarsest grid
  const Field rm = fem::restrictHalf(umid);
  const Field rf = fem::restrictHalf(fem::restrictHalf(ufine));
  const double ec = fem::normL2Diff(ucoarse, rm);
  const double ef = fem::normL2Diff(rm, rf);
  if (ef <= 1e-14 * (fem::normL2(ucoarse) + 1e-300)) return 16.0;  // at floor
  return std::log2(ec / ef);
}

struct FluxSource {
  const CellSolution* cell;
  const model::Coefficient* coef;
  const model::Symbol* sym;
  const Field* Wext;          // general path: extended data to Steklov-sample
  const Field* Gplain;        // bounded path: nodal data to interpolate
  double eps;
};

// || g^eps b(D)u - gtilde^eps S ||_{L2} over the grid of u, streamed per element
double fluxError(const Field& u, const FluxSource& src) {
  const Grid& g = u.grid;
  const int d = g.dim, n = u.ncomp;
  const int m = src.sym->rows();
  const Mat B = src.sym->realBlockRow();
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  const int corners = 1 << d;
  const long ec[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  double vol = 1;
  for (int j = 0; j < d; ++j) vol *= g.h[j];
  std::unique_ptr<fem::SteklovSampler> st;
  if (src.Wext) st = std::make_unique<fem::SteklovSampler>(d, src.eps);
  std::vector<double> meanDu(n * d), G(m), S(m), p(m), t(m);
  double x[3] = {0, 0, 0}, y[3] = {0, 0, 0};
  double acc = 0;
  for (long e0 = 0; e0 < ec[0]; ++e0)
    for (long e1 = 0; e1 < ec[1]; ++e1)
      for (long e2 = 0; e2 < ec[2]; ++e2) {
        const long e[3] = {e0, e1, e2};
        long nodes[8];
        for (int q = 0; q < corners; ++q) {
          long idx[3];
          for (int j = 0; j < d; ++j) idx[j] = g.wrapNode(j, e[j] + ((q >> j) & 1));
          nodes[q] = (idx[0] * n1 + (d > 1 ? idx[1] : 0)) * n2 + (d > 2 ? idx[2] : 0);
        }
        for (int j = 0; j < d; ++j) x[j] = g.nodeCoord(j, e[j]) + 0.5 * g.h[j];
        std::fill(meanDu.begin(), meanDu.end(), 0.0);
        for (int q = 0; q < corners; ++q)
          for (int c = 0; c < n; ++c) {
            const double uv = u.at(nodes[q], c);
            for (int l = 0; l < d; ++l) {
              const double sgn = ((q >> l) & 1) ? 1.0 : -1.0;
              meanDu[l * n + c] += sgn * uv / (g.h[l] * (corners / 2));
            }
          }
        for (int r = 0; r < m; ++r) {
          double s = 0;
          for (int tix = 0; tix < n * d; ++tix) s += B(r, tix) * meanDu[tix];
          G[r] = s;
        }
        for (int j = 0; j < d; ++j) {
          y[j] = x[j] / src.eps;
          y[j] -= std::floor(y[j]);
        }
        const Mat gv = src.coef->at(y);
        for (int r = 0; r < m; ++r) {
          double s = 0;
          for (int c = 0; c < m; ++c) s += gv(r, c) * G[c];
          p[r] = s;
        }
        if (src.Wext)
          for (int r = 0; r < m; ++r) S[r] = st->sampleField(*src.Wext, r, x);
        else
          for (int r = 0; r < m; ++r) S[r] = fem::evalField(*src.Gplain, x, r);
        const Mat gt = fluxMatrixAt(*src.cell, *src.coef, *src.sym, y);
        double esq = 0;
        for (int r = 0; r < m; ++r) {
          double s = 0;
          for (int c = 0; c < m; ++c) s += gt(r, c) * S[c];
          t[r] = s;
          esq += (p[r] - t[r]) * (p[r] - t[r]);
        }
        acc += vol * esq;
      }
  return std::sqrt(acc);
}

// lumped L2 norm of the nodal second-difference laplacian, interior nodes
double secondDifferenceNorm(const Field& u) {
  const Grid& g = u.grid;
  const int d = g.dim, n = u.ncomp;
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  double vol = 1;
  for (int j = 0; j < d; ++j) vol *= g.h[j];
  const long stride[3] = {n1 * n2, n2, 1};
  double acc = 0;
  for (long i0 = 0; i0 < g.nodesAxis(0); ++i0)
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        const long ia[3] = {i0, i1, i2};
        bool interior = true;
        for (int j = 0; j < d; ++j)
          if (ia[j] == 0 || ia[j] == g.nodesAxis(j) - 1) interior = false;
        if (!interior) continue;
        const long node = i0 * stride[0] + i1 * stride[1] + i2 * stride[2];
        for (int c = 0; c < n; ++c) {
          double lap = 0;
          for (int j = 0; j < d; ++j) {
            const long s = stride[j];
            lap += (u.at(node + s, c) - 2 * u.at(node, c) + u.at(node - s, c)) /
                   (g.h[j] * g.h[j]);
          }
          acc += vol * lap * lap;
        }
      }
  return std::sqrt(acc);
}

}  // namespace

DirichletStage dirichletStage(const Problem& p, const CellSolution& cell, double eps,
                              const DirichletOptions& opt) {
  const int d = p.dim();
  const int n = p.symbol.cols();
  if (!(eps > 0) || eps > 0.5) throw std::invalid_argument("scale must lie in (0, 1/2]");
  if (opt.grid_per_eps < 16)
    throw std::invalid_argument("comparison grid must keep at least 16 cells per scale");
  if (opt.flux_refine != 2 && opt.flux_refine != 4)
    throw std::invalid_argument("flux refinement must be 2 or 4");
  if (opt.path == DirichletPath::BoundedLambda && !opt.bounded_corrector)
    throw std::invalid_argument(
        "plain corrector data requires the bounded-corrector assertion");
  const long N = std::lround(opt.grid_per_eps / eps);
  if (std::abs(N * eps - double(opt.grid_per_eps)) > 1e-9)
    throw std::invalid_argument("scale does not tile the comparison grid");

  const auto forcing = opt.forcing
                           ? opt.forcing
                           : [d](const double* x, double* out) { defaultForcing(d, x, out); };
  const model::Constants K = p.constants(std::sqrt(double(d)));

  const Grid gc = unitBox(d, N);
  const Field F = nodalField(gc, n, forcing);
  const double nF = fem::normL2(F);
  long iters = 0;

  fem::Operator Ac(gc, p.symbol, p.coefficient, eps, 0.0, fem::BC::Dirichlet0);
  const Field uc = solveWithLoad(Ac, F, opt.solve, iters);
  assertEnergyBound(uc, nF, K.energy_bound, "oscillatory solve");

  // doubled-grid reference, same scale
  Field uref, umid, ufine;
  {
    const Grid gm = unitBox(d, 2 * N);
    fem::Operator Am(gm, p.symbol, p.coefficient, eps, 0.0, fem::BC::Dirichlet0);
    umid = solveWithLoad(Am, nodalField(gm, n, forcing), opt.solve, iters);
  }
  {
    const Grid gfx = unitBox(d, opt.flux_refine * N);
    fem::Operator Afx(gfx, p.symbol, p.coefficient, eps, 0.0, fem::BC::Dirichlet0);
    ufine = solveWithLoad(Afx, nodalField(gfx, n, forcing), opt.solve, iters);
  }
  double order;
  if (opt.flux_refine == 4) {
    order = ladderOrder(uc, umid, ufine);
  } else {
    if (N % 2 != 0) throw std::invalid_argument("ladder order check needs an even grid");
    const Grid gh = unitBox(d, N / 2);
    fem::Operator Ah(gh, p.symbol, p.coefficient, eps, 0.0, fem::BC::Dirichlet0);
    const Field uh = solveWithLoad(Ah, nodalField(gh, n, forcing), opt.solve, iters);
    order = ladderOrder(uh, uc, umid);
  }
  if (order < opt.richardson_min_order) {
    std::ostringstream os;
    os << "grid ladder self-convergence order " << order << " below "
       << opt.richardson_min_order << "; reference rejected";
    throw std::runtime_error(os.str());
  }

  uref = fem::restrictHalf(umid);
  umid = Field();
  Field urich = uref;
  for (size_t i = 0; i < urich.data.size(); ++i)
    urich.data[i] += (uref.data[i] - uc.data[i]) / 3.0;
  uref = Field();

  Field u0;
  {
    fem::Operator A0(gc, p.symbol, cell.g_eff, 0.0, fem::BC::Dirichlet0);
    u0 = solveWithLoad(A0, F, opt.solve, iters);
  }
  assertEnergyBound(u0, nF, K.energy_bound, "homogenized solve");

  // corrector data: extended and cell-averaged on the general path, raw nodal
  // gradients on the bounded path
  const long pad = std::max<long>(2, N / 4);
  if (pad * gc.h[0] < 0.5 * eps + gc.h[0])
    throw std::invalid_argument("extension collar too narrow for the averaging reach");
  Field Wext;
  {
    const Field u0ext = fem::extendTapered(u0, pad);
    Wext = symbolGradients(u0ext, p.symbol);
  }
  Field S;  // corrector data for v, at comparison nodes
  if (opt.path == DirichletPath::General)
    S = sampleSmoothed(Wext, gc, eps);
  else
    S = symbolGradients(u0, p.symbol);

  Field v = correctedField(u0, cell, eps, S);

  // boundary discrepancy: phi carries the corrector trace, w lifts it through
  // the oscillatory operator
  Field phiData;  // data entering phi; the bounded path uses the extension
  if (opt.path == DirichletPath::General)
    phiData = S;
  else
    phiData = restrictPadded(Wext, gc, pad);
  Field phi;
  {
    Field zero(gc, n);
    phi = correctedField(zero, cell, eps, phiData);
    const int dloc = d;
    const long n1 = dloc > 1 ? gc.nodesAxis(1) : 1;
    const long n2 = dloc > 2 ? gc.nodesAxis(2) : 1;
    double x[3] = {0, 0, 0};
    for (long i0 = 0; i0 < gc.nodesAxis(0); ++i0)
      for (long i1 = 0; i1 < n1; ++i1)
        for (long i2 = 0; i2 < n2; ++i2) {
          const long idx[3] = {i0, i1, i2};
          for (int j = 0; j < dloc; ++j) x[j] = gc.nodeCoord(j, idx[j]);
          const double th = fem::boundaryCutoff(fem::boundaryDistance(gc, x), eps);
          const long node = (i0 * n1 + i1) * n2 + i2;
          for (int c = 0; c < n; ++c) phi.at(node, c) *= th;
        }
  }
  Field w;
  {
    std::vector<double> rhs_w(phi.data.size());
    Ac.applyRaw(phi.data.data(), rhs_w.data());
    for (double& vv : rhs_w) vv = -vv;
    std::vector<double> x;
    iters += fem::solve(Ac, rhs_w, x, opt.solve).iterations;
    w = phi;
    for (size_t i = 0; i < w.data.size(); ++i) w.data[i] += x[i];
  }

  FluxSource src;
  src.cell = &cell;
  src.coef = &p.coefficient;
  src.sym = &p.symbol;
  src.eps = eps;
  Field Gplain;
  if (opt.path == DirichletPath::General) {
    src.Wext = &Wext;
    src.Gplain = nullptr;
  } else {
    Gplain = symbolGradients(u0, p.symbol);
    src.Wext = nullptr;
    src.Gplain = &Gplain;
  }
  const double ferr = fluxError(ufine, src);
  ufine = Field();

  DirichletStage out;
  out.row.eps = eps;
  out.row.resolution = N;
  out.row.cg_iters = iters;
  out.row.richardson_order = order;
  out.row.l2_err = fem::normL2Diff(urich, u0) / nF;
  out.row.h1_corr_err = fem::normH1Diff(urich, v) / nF;
  out.row.plain_h1_err = fem::normH1Diff(urich, u0) / nF;
  out.row.flux_err = ferr / nF;
  const double phiH1 = fem::normH1(phi) / nF;
  out.row.phi_h1_over_sqrt_eps = phiH1 / std::sqrt(eps);
  out.row.w_h1 = fem::normH1(w) / nF;
  out.row.gamma0_slack = K.discrepancy_gain * phiH1 - out.row.w_h1;
  out.row.h2_ratio = secondDifferenceNorm(u0) / nF;
  out.u_rich = std::move(urich);
  out.u0 = std::move(u0);
  out.v = std::move(v);
  out.smoothed = std::move(S);
  out.phi = std::move(phi);
  out.w = std::move(w);
  return out;
}

DirichletSweepResult dirichletSweep(const Problem& p, const CellSolution& cell,
                                    const std::vector<double>& eps_list,
                                    const DirichletOptions& opt) {
  DirichletSweepResult out;
  out.rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    DirichletStage st = dirichletStage(p, cell, eps, opt);
    out.rows.push_back(st.row);
  }
  return out;
}

}  // namespace homog
