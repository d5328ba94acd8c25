#include "core/smoothing.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "core/fftwrap.hpp"
#include "core/norms.hpp"

namespace homog::fem {

namespace {

// strict membership of eps*xi in the open dual Voronoi cell
bool keepMode(const model::Lattice& lat, bool cubic, const double* exi, int d) {
  if (cubic) {
    for (int j = 0; j < d; ++j)
      if (!(std::abs(exi[j]) < M_PI)) return false;
    return true;
  }
  double n2 = 0;
  for (int j = 0; j < d; ++j) n2 += exi[j] * exi[j];
  const Mat& Bd = lat.dual();
  long zi[3] = {0, 0, 0};
  const long w = 2;  // window of dual points; ample for the Voronoi test
  for (zi[0] = -w; zi[0] <= w; ++zi[0])
    for (zi[1] = d > 1 ? -w : 0; zi[1] <= (d > 1 ? w : 0); ++zi[1])
      for (zi[2] = d > 2 ? -w : 0; zi[2] <= (d > 2 ? w : 0); ++zi[2]) {
        if (zi[0] == 0 && zi[1] == 0 && zi[2] == 0) continue;
        double dist2 = 0;
        for (int r = 0; r < d; ++r) {
          double br = 0;
          for (int c = 0; c < d; ++c) br += Bd(r, c) * zi[c];
          const double t = exi[r] - br;
          dist2 += t * t;
        }
        if (!(n2 < dist2)) return false;
      }
  return true;
}

// applies a complex multiplier tau(xi) per mode to every component of u
template <class TauFn>
Field applyMultiplier(const Field& u, TauFn&& tau) {
  const Grid& g = u.grid;
  if (!g.periodic) throw std::invalid_argument("spectral filtering needs a torus grid");
  const int d = g.dim;
  long n[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  const long last = n[d - 1];
  const long lasth = last / 2 + 1;
  long nspec = lasth;
  for (int j = 0; j < d - 1; ++j) nspec *= n[j];
  const long nreal = g.nodeCount();

  std::vector<double> comp(nreal);
  std::vector<std::complex<double>> spec(nspec);
  Field out(g, u.ncomp);
  double xi[3] = {0, 0, 0};
  const double scale = 1.0 / static_cast<double>(nreal);

  for (int c = 0; c < u.ncomp; ++c) {
    for (long i = 0; i < nreal; ++i) comp[i] = u.data[i * u.ncomp + c];
    fft::forwardR2C(d, n, comp.data(), spec.data());
    // stored spectrum: full range on leading axes, half on the last
    long p = 0;
    const long c0 = d >= 2 ? n[0] : 1;
    const long c1 = d >= 3 ? n[1] : 1;
    for (long a0 = 0; a0 < c0; ++a0)
      for (long a1 = 0; a1 < c1; ++a1)
        for (long aL = 0; aL < lasth; ++aL, ++p) {
          long kk[3] = {0, 0, 0};
          if (d == 1) {
            kk[0] = aL;
          } else if (d == 2) {
            kk[0] = a0;
            kk[1] = aL;
          } else {
            kk[0] = a0;
            kk[1] = a1;
            kk[2] = aL;
          }
          bool nyquist = false;
          for (int j = 0; j < d; ++j) {
            long kj = kk[j];
            if (j < d - 1 && kj > n[j] / 2) kj -= n[j];
            if (n[j] % 2 == 0 && (kj == n[j] / 2 || kj == -n[j] / 2)) nyquist = true;
            xi[j] = 2.0 * M_PI * kj / g.extent(j);
          }
          if (nyquist) {
            spec[p] = 0.0;
            continue;
          }
          spec[p] *= tau(xi);
        }
    fft::backwardC2R(d, n, spec.data(), comp.data());
    for (long i = 0; i < nreal; ++i) out.data[i * u.ncomp + c] = comp[i] * scale;
  }
  return out;
}

void rejectCutoffAtNyquist(const Field& u, const model::Lattice& lat, double eps) {
  const Grid& g = u.grid;
  const bool cubic = lat.isCubic();
  for (int j = 0; j < g.dim; ++j) {
    double exi[3] = {0, 0, 0};
    exi[j] = eps * M_PI / g.h[j];
    if (keepMode(lat, cubic, exi, g.dim)) {
      std::ostringstream os;
      os << "low-pass cutoff reaches the Nyquist frequency on axis " << j
         << " (eps = " << eps << ", h = " << g.h[j] << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace

Field fourierProject(const Field& u, const model::Lattice& lattice, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("low-pass scale must be positive");
  rejectCutoffAtNyquist(u, lattice, eps);
  const bool cubic = lattice.isCubic();
  const int d = u.grid.dim;
  return applyMultiplier(u, [&](const double* xi) -> std::complex<double> {
    double exi[3];
    for (int j = 0; j < d; ++j) exi[j] = eps * xi[j];
    return keepMode(lattice, cubic, exi, d) ? 1.0 : 0.0;
  });
}

Field spectralDerivative(const Field& u, const model::Lattice& lattice, int axis,
                         double eps) {
  if (axis < 0 || axis >= u.grid.dim) throw std::invalid_argument("derivative axis out of range");
  const bool cubic = lattice.isCubic();
  const int d = u.grid.dim;
  if (eps > 0) rejectCutoffAtNyquist(u, lattice, eps);
  return applyMultiplier(u, [&](const double* xi) -> std::complex<double> {
    if (eps > 0) {
      double exi[3];
      for (int j = 0; j < d; ++j) exi[j] = eps * xi[j];
      if (!keepMode(lattice, cubic, exi, d)) return 0.0;
    }
    return std::complex<double>(0.0, xi[axis]);
  });
}

Field steklovProject(const Field& u, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("cell-average scale must be positive");
  const int d = u.grid.dim;
  return applyMultiplier(u, [&](const double* xi) -> std::complex<double> {
    return SteklovSampler::planeWaveFactor(d, eps, xi);
  });
}

SteklovSampler::SteklovSampler(int dim, double eps, int order)
    : dim_(dim), order_(order), eps_(eps) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("sampler dim must be 1..3");
  if (order < 2 || order > 32) throw std::invalid_argument("sampler order must be 2..32");
  if (!(eps > 0)) throw std::invalid_argument("sampler scale must be positive");

  // Gauss-Legendre on (-1/2, 1/2), weights summing to 1
  std::vector<double> gx(order), gw(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double p0 = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      double p1 = 0.0;
      for (int kk = 1; kk <= order; ++kk) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p2) / kk;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gx[i] = 0.5 * x;
    gw[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }

  npts_ = 1;
  for (int j = 0; j < dim; ++j) npts_ *= order;
  z_.resize(static_cast<size_t>(npts_) * dim);
  w_.resize(npts_);
  for (int p = 0; p < npts_; ++p) {
    int rem = p;
    double wt = 1;
    for (int j = dim - 1; j >= 0; --j) {
      const int i = rem % order;
      rem /= order;
      z_[static_cast<size_t>(p) * dim + j] = gx[i];
      wt *= gw[i];
    }
    w_[p] = wt;
  }
}

double SteklovSampler::sampleField(const Field& w, int comp, const double* x) const {
  const Grid& g = w.grid;
  if (g.dim != dim_) throw std::invalid_argument("sampler/field dimension mismatch");
  if (!g.periodic) {
    // every sample point x - eps z, z in (-1/2,1/2)^d, must stay on the carrier
    for (int j = 0; j < dim_; ++j) {
      const double reach = eps_ * 0.5;
      const double lo = x[j] - reach, hi = x[j] + reach;
      const double tol = 1e-12 * (std::abs(g.extent(j)) + 1.0);
      if (lo < g.origin[j] - tol || hi > g.origin[j] + g.extent(j) + tol) {
        std::ostringstream os;
        os << "cell-average sample leaves the carrier at (";
        for (int t = 0; t < dim_; ++t) os << (t ? ", " : "") << x[t];
        os << ") along axis " << j;
        throw std::domain_error(os.str());
      }
    }
  }
  // per-axis interpolation tables for the 1D Gauss offsets, shared across the
  // tensor product (each axis only ever sees `order` distinct offsets); the
  // first `order` tensor points enumerate the last axis, which recovers the
  // 1D abscissas from the tensor table
  long base[3][32];
  long next[3][32];
  double frac[3][32];
  std::vector<double> axis_nodes(order_);
  for (int i = 0; i < order_; ++i)
    axis_nodes[i] = z_[static_cast<size_t>(i) * dim_ + (dim_ - 1)];
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i < order_; ++i) {
      double s = (x[j] - eps_ * axis_nodes[i] - g.origin[j]) / g.h[j];
      if (g.periodic) {
        s -= std::floor(s / g.cells[j]) * g.cells[j];
      } else {
        if (s < 0) s = 0;
        if (s > g.cells[j]) s = static_cast<double>(g.cells[j]);
      }
      long e = static_cast<long>(s);
      if (e >= g.cells[j]) e = g.cells[j] - 1;
      base[j][i] = e;
      next[j][i] = g.wrapNode(j, e + 1);
      frac[j][i] = s - e;
    }
  }
  const long n1 = dim_ > 1 ? g.nodesAxis(1) : 1;
  const long n2 = dim_ > 2 ? g.nodesAxis(2) : 1;
  const double* data = w.data.data();
  const int nc = w.ncomp;
  double acc = 0;
  if (dim_ == 2) {
    for (int i0 = 0; i0 < order_; ++i0) {
      const long a0 = base[0][i0] * n1, b0 = next[0][i0] * n1;
      const double f0 = frac[0][i0];
      double line = 0;
      for (int i1 = 0; i1 < order_; ++i1) {
        const long a1 = base[1][i1], b1 = next[1][i1];
        const double f1 = frac[1][i1];
        const double v00 = data[(a0 + a1) * nc + comp], v01 = data[(a0 + b1) * nc + comp];
        const double v10 = data[(b0 + a1) * nc + comp], v11 = data[(b0 + b1) * nc + comp];
        line += w_[static_cast<size_t>(i0) * order_ + i1] *
                ((1 - f0) * ((1 - f1) * v00 + f1 * v01) + f0 * ((1 - f1) * v10 + f1 * v11));
      }
      acc += line;
    }
    return acc;
  }
  for (int p = 0; p < npts_; ++p) {
    int rem = p;
    int io[3] = {0, 0, 0};
    for (int j = dim_ - 1; j >= 0; --j) {
      io[j] = rem % order_;
      rem /= order_;
    }
    double v = 0;
    for (int q = 0; q < (1 << dim_); ++q) {
      double wt = 1;
      long idx[3] = {0, 0, 0};
      for (int j = 0; j < dim_; ++j) {
        const int bit = (q >> j) & 1;
        wt *= bit ? frac[j][io[j]] : 1 - frac[j][io[j]];
        idx[j] = bit ? next[j][io[j]] : base[j][io[j]];
      }
      const long node = (idx[0] * n1 + (dim_ > 1 ? idx[1] : 0)) * n2 + (dim_ > 2 ? idx[2] : 0);
      v += wt * data[node * nc + comp];
    }
    acc += w_[p] * v;
  }
  return acc;
}

double SteklovSampler::sample(const std::function<double(const double*)>& f,
                              const double* x) const {
  double acc = 0;
  double y[3] = {0, 0, 0};
  for (int p = 0; p < npts_; ++p) {
    for (int j = 0; j < dim_; ++j) y[j] = x[j] - eps_ * z_[static_cast<size_t>(p) * dim_ + j];
    acc += w_[p] * f(y);
  }
  return acc;
}

double SteklovSampler::planeWaveFactor(int dim, double eps, const double* xi) {
  double f = 1;
  for (int j = 0; j < dim; ++j) {
    const double t = 0.5 * eps * xi[j];
    f *= std::abs(t) < 1e-14 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  }
  return f;
}

SmoothingSuite smoothingSuite(SmoothKind kind, const std::vector<Field>& samples,
                              const model::Lattice& lattice, double eps, double rate,
                              const std::function<double(const double*)>& profile,
                              double profile_rms, double mult_allowance) {
  SmoothingSuite rep;
  if (samples.empty()) return rep;
  const Grid& g = samples.front().grid;
  const int d = g.dim;

  auto op = [&](const Field& f) {
    return kind == SmoothKind::FourierProjection ? fourierProject(f, lattice, eps)
                                                 : steklovProject(f, eps);
  };

  std::vector<Field> sm;
  sm.reserve(samples.size());
  for (const Field& u : samples) {
    if (u.grid.cells != g.cells || u.ncomp != samples.front().ncomp)
      throw std::invalid_argument("suite samples must share one carrier");
    sm.push_back(op(u));
  }

  auto raise = [&](double& worst, double ratio, double limit) {
    if (ratio > worst) worst = ratio;
    if (ratio > limit) ++rep.violations;
  };

  for (size_t s = 0; s < samples.size(); ++s) {
    const Field& u = samples[s];
    const Field& su = sm[s];
    const double unorm = normL2(u);
    if (!(unorm > 0)) continue;

    std::vector<Field> du;
    double grad2 = 0;
    for (int a = 0; a < d; ++a) {
      du.push_back(spectralDerivative(u, lattice, a, 0.0));
      const double na = normL2(du.back());
      grad2 += na * na;
    }
    const double dunorm = std::sqrt(grad2);

    raise(rep.worst_decay, normL2Diff(su, u) / (eps * rate * dunorm + 1e-13 * unorm),
          1.0 + 1e-10);
    raise(rep.worst_opnorm, normL2(su) / unorm, 1.0 + 1e-12);

    double comm2 = 0;
    for (int a = 0; a < d; ++a) {
      const double ca = normL2Diff(spectralDerivative(su, lattice, a, 0.0), op(du[a]));
      comm2 += ca * ca;
    }
    raise(rep.worst_commute, std::sqrt(comm2) / (dunorm + 1e-13 * unorm), 1e-10);

    {
      const Field& v = samples[(s + 1) % samples.size()];
      Field mix(g, u.ncomp);
      for (size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = 0.75 * u.data[i] + 1.25 * v.data[i];
      Field smix = op(mix);
      for (size_t i = 0; i < smix.data.size(); ++i)
        smix.data[i] -= 0.75 * su.data[i] + 1.25 * sm[(s + 1) % samples.size()].data[i];
      raise(rep.worst_linearity, normL2(smix) / (unorm + normL2(v)), 1e-13);
    }

    if (kind == SmoothKind::FourierProjection)
      raise(rep.worst_idem, normL2Diff(op(su), su) / unorm, 1e-13);

    if (profile) {
      // subcell midpoint rule: f evaluated exactly, the smoothed field through
      // its interpolant; the caller's allowance absorbs both quadrature errors
      const int sub = 4;
      double vol = 1;
      long nelem = 1;
      for (int j = 0; j < d; ++j) {
        vol *= g.h[j] / sub;
        nelem *= g.cells[j];
      }
      double acc = 0;
      long ie[3] = {0, 0, 0};
      int is[3] = {0, 0, 0};
      long nsub = 1;
      for (int j = 0; j < d; ++j) nsub *= sub;
      for (long e = 0; e < nelem; ++e) {
        long rem = e;
        for (int j = d - 1; j >= 0; --j) {
          ie[j] = rem % g.cells[j];
          rem /= g.cells[j];
        }
        for (long q = 0; q < nsub; ++q) {
          long r2 = q;
          for (int j = d - 1; j >= 0; --j) {
            is[j] = static_cast<int>(r2 % sub);
            r2 /= sub;
          }
          double x[3] = {0, 0, 0}, y[3] = {0, 0, 0};
          for (int j = 0; j < d; ++j) {
            x[j] = g.origin[j] + (ie[j] + (is[j] + 0.5) / sub) * g.h[j];
            y[j] = x[j] / eps;
          }
          const double f = profile(y);
          double p2 = 0;
          for (int c = 0; c < su.ncomp; ++c) {
            const double v = evalField(su, x, c);
            p2 += v * v;
          }
          acc += vol * f * f * p2;
        }
      }
      raise(rep.worst_mult,
            std::sqrt(acc) / (profile_rms * unorm * (1.0 + mult_allowance)), 1.0);
    }
  }
  return rep;
}

}  // namespace homog::fem
