#include "core/solver.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "core/fftwrap.hpp"

namespace homog::fem {

namespace {

using cdouble = std::complex<double>;

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dotv(a, a)); }

// ---------------------------------------------------------------- preconditioners

struct Precond {
  virtual ~Precond() = default;
  virtual void apply(const std::vector<double>& r, std::vector<double>& z) = 0;
  std::string name;
};

struct JacobiP final : Precond {
  std::vector<double> invdiag;
  explicit JacobiP(const Operator& A) {
    auto d = A.diagonal();
    invdiag.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i) invdiag[i] = 1.0 / d[i];
    name = "jacobi";
  }
  void apply(const std::vector<double>& r, std::vector<double>& z) override {
    z.resize(r.size());
    for (size_t i = 0; i < r.size(); ++i) z[i] = invdiag[i] * r[i];
  }
};

/*! Exact inverse of the frozen-mean-medium discrete operator on the torus,
 *  applied per Fourier mode from one-dimensional factor tables. */
struct TorusSpectralP final : Precond {
  Grid g;
  int d, n;
  double sigma;
  Mat C;  // mean gradient form, (n d) x (n d)
  std::vector<double> kh[3], mh[3], sn[3];
  long nm[3] = {1, 1, 1};  // r2c mode counts
  long ntot = 1;
  std::vector<std::vector<cdouble>> spec;
  std::vector<double> comp;

  TorusSpectralP(const Operator& A, Mat Cbar)
      : g(A.grid()), d(A.grid().dim), n(A.ncomp()), sigma(A.sigma()), C(std::move(Cbar)) {
    name = "cg-fourier";
    for (int j = 0; j < d; ++j) {
      const long N = g.cells[j];
      ntot *= N;
      nm[j] = (j == d - 1) ? N / 2 + 1 : N;
      kh[j].resize(nm[j]);
      mh[j].resize(nm[j]);
      sn[j].resize(nm[j]);
      for (long k = 0; k < nm[j]; ++k) {
        const double th = 2 * M_PI * k / N;
        kh[j][k] = (2 - 2 * std::cos(th)) / g.h[j];
        mh[j][k] = g.h[j] * (2 + std::cos(th)) / 3.0;
        sn[j][k] = std::sin(th);
      }
    }
    spec.assign(n, std::vector<cdouble>(nm[0] * nm[1] * nm[2]));
    if (n > 1) comp.resize(g.nodeCount());
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) override {
    z.resize(r.size());
    const long nodes = g.nodeCount();
    long dims[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
    for (int c = 0; c < n; ++c) {
      const double* src = r.data();
      if (n > 1) {
        for (long i = 0; i < nodes; ++i) comp[i] = r[i * n + c];
        src = comp.data();
      }
      fft::forwardR2C(d, dims, src, spec[c].data());
    }
    Mat T(n, n);
    CVec rh(n);
    for (long k0 = 0; k0 < nm[0]; ++k0)
      for (long k1 = 0; k1 < nm[1]; ++k1)
        for (long k2 = 0; k2 < nm[2]; ++k2) {
          const long kk[3] = {k0, k1, k2};
          const long at = (k0 * nm[1] + k1) * nm[2] + k2;
          double mprod = 1;
          for (int j = 0; j < d; ++j) mprod *= mh[j][kk[j]];
          double phi[3][3];
          for (int a = 0; a < d; ++a) {
            phi[a][a] = kh[a][kk[a]] * mprod / mh[a][kk[a]];
            for (int b = 0; b < a; ++b)
              phi[a][b] = phi[b][a] =
                  sn[a][kk[a]] * sn[b][kk[b]] * mprod / (mh[a][kk[a]] * mh[b][kk[b]]);
          }
          if (n == 1) {
            double t = sigma * mprod;
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) t += C(a, b) * phi[a][b];
            spec[0][at] = (t > 0) ? spec[0][at] / t : cdouble(0, 0);
            continue;
          }
          for (int c = 0; c < n; ++c)
            for (int cc = 0; cc < n; ++cc) {
              double t = (c == cc) ? sigma * mprod : 0.0;
              for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) t += C(a * n + c, b * n + cc) * phi[a][b];
              T(c, cc) = t;
            }
          for (int c = 0; c < n; ++c) rh[c] = spec[c][at];
          const bool zero_mode = kk[0] == 0 && kk[1] == 0 && kk[2] == 0;
          if (zero_mode && sigma == 0) {
            for (int c = 0; c < n; ++c) spec[c][at] = 0;
          } else {
            const Mat Tinv = T.inverse();
            for (int c = 0; c < n; ++c) {
              cdouble s(0, 0);
              for (int cc = 0; cc < n; ++cc) s += Tinv(c, cc) * rh[cc];
              spec[c][at] = s;
            }
          }
        }
    for (int c = 0; c < n; ++c) {
      double* dst = (n > 1) ? comp.data() : z.data();
      fft::backwardC2R(d, dims, spec[c].data(), dst);
      const double scale = 1.0 / ntot;
      if (n > 1)
        for (long i = 0; i < nodes; ++i) z[i * n + c] = comp[i] * scale;
      else
        for (long i = 0; i < nodes; ++i) z[i] *= scale;
    }
  }
};

/*! Exact inverse of the frozen diagonal-medium operator on a box with zero
 *  boundary values, via DST-I modes on the interior nodes. */
struct BoxDstP final : Precond {
  Grid g;
  int d;
  double sigma;
  Mat C;  // d x d, diagonal
  std::vector<double> lk[3], lm[3];
  long m[3] = {1, 1, 1};
  double scale = 1;
  std::vector<double> buf;

  BoxDstP(const Operator& A, Mat Cbar)
      : g(A.grid()), d(A.grid().dim), sigma(A.sigma()), C(std::move(Cbar)) {
    name = "cg-sine";
    long tot = 1;
    for (int j = 0; j < d; ++j) {
      const long N = g.cells[j];
      m[j] = N - 1;
      tot *= m[j];
      scale /= 2.0 * N;
      lk[j].resize(m[j]);
      lm[j].resize(m[j]);
      for (long k = 0; k < m[j]; ++k) {
        const double th = M_PI * (k + 1) / N;
        lk[j][k] = (2 - 2 * std::cos(th)) / g.h[j];
        lm[j][k] = g.h[j] * (2 + std::cos(th)) / 3.0;
      }
    }
    buf.resize(tot);
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) override {
    z.assign(r.size(), 0.0);
    const long n1 = d > 1 ? g.nodesAxis(1) : 1;
    const long n2 = d > 2 ? g.nodesAxis(2) : 1;
    long p = 0;
    for (long i0 = 1; i0 <= m[0]; ++i0)
      for (long i1 = (d > 1 ? 1 : 0); i1 <= (d > 1 ? m[1] : 0); ++i1)
        for (long i2 = (d > 2 ? 1 : 0); i2 <= (d > 2 ? m[2] : 0); ++i2)
          buf[p++] = r[(i0 * n1 + i1) * n2 + i2];
    fft::dst1All(d, m, buf.data(), buf.data());
    p = 0;
    for (long k0 = 0; k0 < m[0]; ++k0)
      for (long k1 = 0; k1 < (d > 1 ? m[1] : 1); ++k1)
        for (long k2 = 0; k2 < (d > 2 ? m[2] : 1); ++k2, ++p) {
          const long kk[3] = {k0, k1, k2};
          double mprod = 1;
          for (int j = 0; j < d; ++j) mprod *= lm[j][kk[j]];
          double t = sigma * mprod;
          for (int a = 0; a < d; ++a) t += C(a, a) * lk[a][kk[a]] * mprod / lm[a][kk[a]];
          buf[p] /= t;
        }
    fft::dst1All(d, m, buf.data(), buf.data());
    p = 0;
    for (long i0 = 1; i0 <= m[0]; ++i0)
      for (long i1 = (d > 1 ? 1 : 0); i1 <= (d > 1 ? m[1] : 0); ++i1)
        for (long i2 = (d > 2 ? 1 : 0); i2 <= (d > 2 ? m[2] : 0); ++i2)
          z[(i0 * n1 + i1) * n2 + i2] = buf[p++] * scale;
  }
};

// ---------------------------------------------------------------- tridiagonal kernels

// Thomas elimination; sup[i] couples i and i+1, sub is its conjugate (Hermitian)
bool thomasHermitian(long N, const std::vector<cdouble>& diag, const std::vector<cdouble>& sup,
                     std::vector<cdouble>& x) {
  static thread_local std::vector<cdouble> cp, dp;
  cp.resize(N);
  dp.resize(N);
  cdouble den = diag[0];
  if (std::abs(den) < 1e-300) return false;
  cp[0] = sup[0] / den;
  dp[0] = x[0] / den;
  for (long i = 1; i < N; ++i) {
    const cdouble sub = std::conj(sup[i - 1]);
    den = diag[i] - sub * cp[i - 1];
    if (std::abs(den) < 1e-300) return false;
    cp[i] = (i < N - 1) ? sup[i] / den : cdouble(0, 0);
    dp[i] = (x[i] - sub * dp[i - 1]) / den;
  }
  x[N - 1] = dp[N - 1];
  for (long i = N - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
  return true;
}

bool thomasReal(long N, const std::vector<double>& diag, const std::vector<double>& off,
                std::vector<double>& x) {
  static thread_local std::vector<double> cp, dp;
  cp.resize(N);
  dp.resize(N);
  double den = diag[0];
  if (std::abs(den) < 1e-300) return false;
  cp[0] = N > 1 ? off[0] / den : 0;
  dp[0] = x[0] / den;
  for (long i = 1; i < N; ++i) {
    den = diag[i] - off[i - 1] * cp[i - 1];
    if (std::abs(den) < 1e-300) return false;
    cp[i] = (i < N - 1) ? off[i] / den : 0;
    dp[i] = (x[i] - off[i - 1] * dp[i - 1]) / den;
  }
  x[N - 1] = dp[N - 1];
  for (long i = N - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
  return true;
}

/*! Cyclic Hermitian tridiagonal solve by rank-one splitting.  off[i] couples
 *  node i with node (i+1) mod N; off[N-1] is the wrap coupling. */
bool cyclicHermitian(long N, const std::vector<cdouble>& diag, const std::vector<cdouble>& off,
                     std::vector<cdouble>& x) {
  if (N < 4) return false;
  const cdouble olast = off[N - 1];
  const cdouble gamma = -diag[0];
  if (std::abs(gamma) < 1e-300) return false;
  std::vector<cdouble> dmod(diag.begin(), diag.end());
  dmod[0] -= gamma;
  dmod[N - 1] -= olast * std::conj(olast) / gamma;
  std::vector<cdouble> u(N, cdouble(0, 0));
  u[0] = gamma;
  u[N - 1] = olast;
  if (!thomasHermitian(N, dmod, off, x)) return false;  // x := z1
  if (!thomasHermitian(N, dmod, off, u)) return false;  // u := z2
  const cdouble vz1 = x[0] + std::conj(olast) / gamma * x[N - 1];
  const cdouble vz2 = u[0] + std::conj(olast) / gamma * u[N - 1];
  const cdouble denom = 1.0 + vz2;
  if (std::abs(denom) < 1e-300) return false;
  const cdouble fac = vz1 / denom;
  for (long i = 0; i < N; ++i) x[i] -= fac * u[i];
  return true;
}

/*! Singular periodic flux recurrence: solves K(a) x = f, sum f = 0, where
 *  K(a) is the cyclic P1 stiffness with element coefficients a.  Mean-zero x. */
void periodicFluxSolve(long N, double h, const std::vector<double>& a, std::vector<cdouble>& f) {
  cdouble mean(0, 0);
  for (long i = 0; i < N; ++i) mean += f[i];
  mean /= double(N);
  static thread_local std::vector<cdouble> S, q;
  S.resize(N);
  q.resize(N);
  cdouble run(0, 0);
  for (long i = 0; i < N; ++i) {
    run += f[i] - mean;
    S[i] = run;
  }
  double suminv = 0;
  cdouble num(0, 0);
  for (long i = 0; i < N; ++i) {
    suminv += 1.0 / a[i];
    num += S[i] / a[i];
  }
  const cdouble c = num / suminv;
  for (long i = 0; i < N; ++i) q[i] = c - S[i];
  cdouble acc(0, 0), xm(0, 0);
  for (long i = 0; i < N; ++i) {
    f[i] = acc;  // reuse f as the solution
    xm += acc;
    acc += h * q[i] / a[i];
  }
  xm /= double(N);
  for (long i = 0; i < N; ++i) f[i] -= xm;
}

// ---------------------------------------------------------------- separable direct

struct Separable {
  bool ok = false;
  int axis = 0;
  std::vector<double> profile;
};

Separable detectSeparable(const Operator& A) {
  Separable out;
  if (A.ncomp() != 1 || !A.scalarPath()) return out;
  const Grid& g = A.grid();
  if (g.dim > 2) return out;
  const auto& s = A.elementScale();
  if (g.dim == 1) {
    if (g.cells[0] < 4) return out;
    out.ok = true;
    out.profile = s;
    return out;
  }
  const long E0 = g.cells[0], E1 = g.cells[1];
  if (E0 < 4 || E1 < 4) return out;
  bool ax0 = true, ax1 = true;
  for (long i = 0; i < E0 && ax0; ++i) {
    const double v = s[i * E1];
    for (long j = 1; j < E1; ++j)
      if (s[i * E1 + j] != v) {
        ax0 = false;
        break;
      }
  }
  if (!ax0)
    for (long j = 0; j < E1 && ax1; ++j) {
      const double v = s[j];
      for (long i = 1; i < E0; ++i)
        if (s[i * E1 + j] != v) {
          ax1 = false;
          break;
        }
    }
  if (!ax0 && !ax1) return out;
  out.axis = ax0 ? 0 : 1;
  out.profile.resize(out.axis == 0 ? E0 : E1);
  for (size_t i = 0; i < out.profile.size(); ++i)
    out.profile[i] = out.axis == 0 ? s[i * E1] : s[i];
  // sine modes do not diagonalize the mixed-derivative blocks
  if (!g.periodic) {
    const Mat& C = A.gradientForm();
    const double offd = std::abs(C(0, 1));
    if (offd > 1e-13 * (std::abs(C(0, 0)) + std::abs(C(1, 1)))) return Separable{};
  }
  out.ok = true;
  return out;
}

bool separableTorus(const Operator& A, const Separable& sep, const std::vector<double>& rhs,
                    std::vector<double>& x) {
  const Grid& g = A.grid();
  const Mat& C = A.gradientForm();
  const double sigma = A.sigma();
  const auto& a = sep.profile;
  if (g.dim == 1) {
    const long N = g.cells[0];
    const double h = g.h[0];
    std::vector<cdouble> rv(N);
    for (long i = 0; i < N; ++i) rv[i] = rhs[i];
    if (sigma == 0) {
      for (long i = 0; i < N; ++i) rv[i] /= C(0, 0);
      periodicFluxSolve(N, h, a, rv);
    } else {
      std::vector<cdouble> diag(N), off(N);
      for (long i = 0; i < N; ++i) {
        const double am = a[(i - 1 + N) % N];
        diag[i] = C(0, 0) * (am + a[i]) / h + sigma * 2 * h / 3;
        off[i] = -C(0, 0) * a[i] / h + sigma * h / 6;
      }
      if (!cyclicHermitian(N, diag, off, rv)) return false;
    }
    x.resize(N);
    for (long i = 0; i < N; ++i) x[i] = rv[i].real();
    return true;
  }
  const int v = sep.axis, t = 1 - v;
  const long N0 = g.cells[0], N1 = g.cells[1];
  const long Nv = g.cells[v], Nt = g.cells[t];
  const double hv = g.h[v], ht = g.h[t];
  const long nmode = Nt / 2 + 1;
  std::vector<cdouble> buf(v == 0 ? N0 * nmode : nmode * N1);
  if (v == 0)
    fft::forwardR2CAxis1(N0, N1, rhs.data(), buf.data());
  else
    fft::forwardR2CAxis0(N0, N1, rhs.data(), buf.data());
  std::vector<cdouble> diag(Nv), off(Nv), mv(Nv);
  for (long k = 0; k < nmode; ++k) {
    const double th = 2 * M_PI * k / Nt;
    const double mh = ht * (2 + std::cos(th)) / 3.0;
    const double khv = (2 - 2 * std::cos(th)) / ht;
    const double s = std::sin(th);
    const double aK = C(v, v) * mh;
    const double bM = C(t, t) * khv;
    const double gm = C(v, t) * s;
    const double sm = sigma * mh;
    const long stride = (v == 0) ? nmode : 1;
    cdouble* col = buf.data() + (v == 0 ? k : k * N1);
    for (long i = 0; i < Nv; ++i) mv[i] = col[i * stride];
    if (k == 0 && sigma == 0) {
      for (long i = 0; i < Nv; ++i) mv[i] /= C(v, v) * ht;
      periodicFluxSolve(Nv, hv, a, mv);
    } else {
      for (long i = 0; i < Nv; ++i) {
        const double am = a[(i - 1 + Nv) % Nv];
        diag[i] = aK * (am + a[i]) / hv + bM * (am + a[i]) * hv / 3 + sm * 2 * hv / 3;
        off[i] = cdouble(-aK * a[i] / hv + bM * a[i] * hv / 6 + sm * hv / 6, -gm * a[i]);
      }
      if (!cyclicHermitian(Nv, diag, off, mv)) return false;
    }
    for (long i = 0; i < Nv; ++i) col[i * stride] = mv[i];
  }
  x.assign(N0 * N1, 0.0);
  if (v == 0)
    fft::backwardC2RAxis1(N0, N1, buf.data(), x.data());
  else
    fft::backwardC2RAxis0(N0, N1, buf.data(), x.data());
  const double scale = 1.0 / Nt;
  for (auto& e : x) e *= scale;
  return true;
}

bool separableBox(const Operator& A, const Separable& sep, const std::vector<double>& rhs,
                  std::vector<double>& x) {
  const Grid& g = A.grid();
  const Mat& C = A.gradientForm();
  const double sigma = A.sigma();
  const auto& a = sep.profile;
  if (g.dim == 1) {
    const long N = g.cells[0];
    const long M = N - 1;
    const double h = g.h[0];
    std::vector<double> diag(M), off(M > 1 ? M - 1 : 0), sol(M);
    for (long i = 1; i <= M; ++i) {
      diag[i - 1] = C(0, 0) * (a[i - 1] + a[i]) / h + sigma * 2 * h / 3;
      if (i < M) off[i - 1] = -C(0, 0) * a[i] / h + sigma * h / 6;
      sol[i - 1] = rhs[i];
    }
    if (!thomasReal(M, diag, off, sol)) return false;
    x.assign(g.nodeCount(), 0.0);
    for (long i = 1; i <= M; ++i) x[i] = sol[i - 1];
    return true;
  }
  const int v = sep.axis, t = 1 - v;
  const long Nv = g.cells[v], Nt = g.cells[t];
  const double hv = g.h[v], ht = g.h[t];
  const long Mv = Nv - 1, Mt = Nt - 1;
  const long m0 = g.cells[0] - 1, m1 = g.cells[1] - 1;
  const long n1 = g.nodesAxis(1);
  std::vector<double> buf(m0 * m1);
  for (long i = 1; i <= m0; ++i)
    for (long j = 1; j <= m1; ++j) buf[(i - 1) * m1 + (j - 1)] = rhs[i * n1 + j];
  if (t == 1)
    fft::dst1Axis1(m0, m1, buf.data());
  else
    fft::dst1Axis0(m0, m1, buf.data());
  std::vector<double> diag(Mv), off(Mv > 1 ? Mv - 1 : 0), sol(Mv);
  for (long k = 0; k < Mt; ++k) {
    const double th = M_PI * (k + 1) / Nt;
    const double lm = ht * (2 + std::cos(th)) / 3.0;
    const double lkv = (2 - 2 * std::cos(th)) / ht;
    const double aK = C(v, v) * lm;
    const double bM = C(t, t) * lkv;
    const double sm = sigma * lm;
    for (long i = 1; i <= Mv; ++i) {
      diag[i - 1] = aK * (a[i - 1] + a[i]) / hv + bM * (a[i - 1] + a[i]) * hv / 3 + sm * 2 * hv / 3;
      if (i < Mv) off[i - 1] = -aK * a[i] / hv + bM * a[i] * hv / 6 + sm * hv / 6;
    }
    const long stride = (t == 1) ? m1 : 1;
    double* col = buf.data() + (t == 1 ? k : k * m1);
    for (long i = 0; i < Mv; ++i) sol[i] = col[i * stride];
    if (!thomasReal(Mv, diag, off, sol)) return false;
    for (long i = 0; i < Mv; ++i) col[i * stride] = sol[i];
  }
  if (t == 1)
    fft::dst1Axis1(m0, m1, buf.data());
  else
    fft::dst1Axis0(m0, m1, buf.data());
  const double scale = 1.0 / (2 * Nt);
  x.assign(g.nodeCount(), 0.0);
  for (long i = 1; i <= m0; ++i)
    for (long j = 1; j <= m1; ++j) x[i * n1 + j] = buf[(i - 1) * m1 + (j - 1)] * scale;
  return true;
}

// ---------------------------------------------------------------- CG driver

SolveReport pcg(const Operator& A, const std::vector<double>& b, std::vector<double>& x,
                Precond& P, const SolveOptions& opts, bool project) {
  const long N = A.dof();
  x.assign(N, 0.0);
  std::vector<double> r = b, z(N), p(N), Ap(N);
  SolveReport rep;
  rep.method = P.name;
  const double bnorm = norm2(r);
  if (bnorm == 0) {
    rep.converged = true;
    return rep;
  }
  const long maxiter =
      opts.maxiter > 0 ? opts.maxiter : static_cast<long>(20 * std::sqrt(double(N))) + 200;
  P.apply(r, z);
  if (project) projectMeanZero(A.ncomp(), z);
  p = z;
  double rz = dotv(r, z);
  for (long it = 1; it <= maxiter; ++it) {
    A.apply(p.data(), Ap.data());
    const double pAp = dotv(p, Ap);
    if (!(pAp > 0)) break;
    const double alpha = rz / pAp;
    for (long i = 0; i < N; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rep.iterations = it;
    const double rn = norm2(r);
    rep.rel_residual = rn / bnorm;
    if (rn <= opts.tol * bnorm) {
      rep.converged = true;
      break;
    }
    P.apply(r, z);
    if (project) projectMeanZero(A.ncomp(), z);
    const double rz2 = dotv(r, z);
    const double beta = rz2 / rz;
    rz = rz2;
    for (long i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  if (project) projectMeanZero(A.ncomp(), x);
  return rep;
}

Mat meanGradientForm(const Operator& A) {
  if (!A.scalarPath()) return A.gradientForm();
  const auto& s = A.elementScale();
  double mean = 0;
  for (double v : s) mean += v;
  mean /= s.empty() ? 1.0 : double(s.size());
  return mean * A.gradientForm();
}

}  // namespace

void projectMeanZero(int ncomp, std::vector<double>& v) {
  const long nodes = static_cast<long>(v.size()) / ncomp;
  for (int c = 0; c < ncomp; ++c) {
    double mean = 0;
    for (long i = 0; i < nodes; ++i) mean += v[i * ncomp + c];
    mean /= double(nodes);
    for (long i = 0; i < nodes; ++i) v[i * ncomp + c] -= mean;
  }
}

SolveReport solve(const Operator& A, const std::vector<double>& rhs0, std::vector<double>& x,
                  const SolveOptions& opts) {
  const long N = A.dof();
  if (static_cast<long>(rhs0.size()) != N) throw std::invalid_argument("rhs size mismatch");
  std::vector<double> rhs = rhs0;
  const bool project = A.sigma() == 0 && A.bc() != BC::Dirichlet0;
  if (project) projectMeanZero(A.ncomp(), rhs);
  if (A.bc() == BC::Dirichlet0) {
    const auto& mask = A.boundaryMask();
    const int n = A.ncomp();
    for (long i = 0; i < A.grid().nodeCount(); ++i)
      if (mask[i])
        for (int c = 0; c < n; ++c) rhs[i * n + c] = 0.0;
  }

  if (opts.method != SolveOptions::Method::CG) {
    const Separable sep = detectSeparable(A);
    if (sep.ok) {
      const bool done = A.grid().periodic ? separableTorus(A, sep, rhs, x)
                                          : separableBox(A, sep, rhs, x);
      if (done) {
        if (project) projectMeanZero(A.ncomp(), x);
        std::vector<double> r(N);
        A.apply(x.data(), r.data());
        for (long i = 0; i < N; ++i) r[i] = rhs[i] - r[i];
        const double bn = norm2(rhs), rn = norm2(r);
        SolveReport rep;
        rep.method = "direct-separable";
        rep.rel_residual = bn > 0 ? rn / bn : 0.0;
        rep.converged = bn == 0 || rn <= std::max(opts.tol, 1e-9) * bn;
        if (rep.converged) return rep;
      }
    }
    if (opts.method == SolveOptions::Method::Direct)
      throw std::domain_error("operator admits no exact factorization");
  }

  std::unique_ptr<Precond> P;
  const bool torus = A.grid().periodic;
  const Mat Cbar = meanGradientForm(A);
  auto diagonalForm = [&]() {
    if (A.ncomp() != 1 || A.grid().dim < 1) return false;
    double offd = 0, dg = 0;
    for (int a = 0; a < A.grid().dim; ++a)
      for (int b = 0; b < A.grid().dim; ++b)
        (a == b ? dg : offd) += std::abs(Cbar(a, b));
    return offd <= 1e-13 * dg;
  };
  switch (opts.precond) {
    case SolveOptions::Precond::Jacobi:
      P = std::make_unique<JacobiP>(A);
      break;
    case SolveOptions::Precond::Spectral:
      if (torus)
        P = std::make_unique<TorusSpectralP>(A, Cbar);
      else if (A.bc() == BC::Dirichlet0 && diagonalForm())
        P = std::make_unique<BoxDstP>(A, Cbar);
      else
        throw std::domain_error("no spectral preconditioner for this operator");
      break;
    case SolveOptions::Precond::Auto:
      if (torus)
        P = std::make_unique<TorusSpectralP>(A, Cbar);
      else if (A.bc() == BC::Dirichlet0 && diagonalForm())
        P = std::make_unique<BoxDstP>(A, Cbar);
      else
        P = std::make_unique<JacobiP>(A);
      break;
  }
  SolveReport rep = pcg(A, rhs, x, *P, opts, project);
  if (!rep.converged) {
    std::ostringstream os;
    os << "iterative solve stalled: relative residual " << rep.rel_residual << " after "
       << rep.iterations << " iterations (" << rep.method << ")";
    throw std::runtime_error(os.str());
  }
  return rep;
}

}  // namespace homog::fem
