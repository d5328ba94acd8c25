#include "core/norms.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/operators.hpp"

namespace homog::fem {

namespace {

// visits every tensor Gauss point; fn(w, vals[n], grads[n * d], x[d])
template <class Fn>
void forEachGaussPoint(const Field& u, Fn&& fn) {
  const Grid& g = u.grid;
  const int d = g.dim, n = u.ncomp;
  const GaussRule rule(g);
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  const int corners = 1 << d;
  const long ec[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  std::vector<double> vals(n), grads(n * d);
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
          std::fill(vals.begin(), vals.end(), 0.0);
          std::fill(grads.begin(), grads.end(), 0.0);
          for (int q = 0; q < corners; ++q)
            for (int c = 0; c < n; ++c) {
              const double uv = u.at(nodes[q], c);
              double wv = 1;
              for (int j = 0; j < d; ++j) wv *= rule.val[j][(k >> j) & 1][(q >> j) & 1];
              vals[c] += wv * uv;
              for (int a = 0; a < d; ++a) {
                double w = 1;
                for (int j = 0; j < d; ++j) {
                  const int gi = (k >> j) & 1, ni = (q >> j) & 1;
                  w *= (j == a) ? rule.der[j][gi][ni] : rule.val[j][gi][ni];
                }
                grads[a * n + c] += w * uv;
              }
            }
          fn(rule.weight, vals.data(), grads.data(), x);
        }
      }
}

}  // namespace

double normL2(const Field& u) {
  double s = 0;
  const int n = u.ncomp;
  forEachGaussPoint(u, [&](double w, const double* v, const double*, const double*) {
    for (int c = 0; c < n; ++c) s += w * v[c] * v[c];
  });
  return std::sqrt(s);
}

double normH1semi(const Field& u) {
  double s = 0;
  const int nd = u.ncomp * u.grid.dim;
  forEachGaussPoint(u, [&](double w, const double*, const double* gr, const double*) {
    for (int t = 0; t < nd; ++t) s += w * gr[t] * gr[t];
  });
  return std::sqrt(s);
}

double normH1(const Field& u) {
  double s = 0;
  const int n = u.ncomp, nd = u.ncomp * u.grid.dim;
  forEachGaussPoint(u, [&](double w, const double* v, const double* gr, const double*) {
    for (int c = 0; c < n; ++c) s += w * v[c] * v[c];
    for (int t = 0; t < nd; ++t) s += w * gr[t] * gr[t];
  });
  return std::sqrt(s);
}

namespace {

Field diff(const Field& a, const Field& b) {
  if (!a.grid.sameShape(b.grid) || a.ncomp != b.ncomp)
    throw std::invalid_argument("field difference: shape mismatch");
  Field e = a;
  for (size_t i = 0; i < e.data.size(); ++i) e.data[i] -= b.data[i];
  return e;
}

}  // namespace

double normL2Diff(const Field& a, const Field& b) { return normL2(diff(a, b)); }
double normH1Diff(const Field& a, const Field& b) { return normH1(diff(a, b)); }

double stripL2Sq(const Field& u, const Grid& domain, double width, StripSide side) {
  const Grid& g = u.grid;
  if (g.periodic) throw std::invalid_argument("strip integral needs a box field");
  if (domain.dim != g.dim) throw std::invalid_argument("strip integral: dimension mismatch");
  const int d = g.dim;
  const long sub[3] = {4, d > 1 ? 4 : 1, d > 2 ? 4 : 1};
  double subvol = 1;
  for (int j = 0; j < d; ++j) subvol *= g.h[j] / 4.0;
  double lo[3], hi[3];
  for (int j = 0; j < d; ++j) {
    lo[j] = domain.origin[j];
    hi[j] = domain.origin[j] + domain.extent(j);
  }
  double s = 0;
  const long ec[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  double x[3] = {0, 0, 0};
  for (long e0 = 0; e0 < ec[0]; ++e0)
    for (long e1 = 0; e1 < ec[1]; ++e1)
      for (long e2 = 0; e2 < ec[2]; ++e2) {
        const long e[3] = {e0, e1, e2};
        for (long s0 = 0; s0 < sub[0]; ++s0)
          for (long s1 = 0; s1 < sub[1]; ++s1)
            for (long s2 = 0; s2 < sub[2]; ++s2) {
              const long sc[3] = {s0, s1, s2};
              bool inside = true;
              double din = width + 1, out2 = 0;
              for (int j = 0; j < d; ++j) {
                x[j] = g.nodeCoord(j, e[j]) + (sc[j] + 0.5) * g.h[j] / 4.0;
                const double excess = std::max(lo[j] - x[j], x[j] - hi[j]);
                if (excess > 0) {
                  inside = false;
                  out2 += excess * excess;
                } else {
                  din = std::min(din, std::min(x[j] - lo[j], hi[j] - x[j]));
                }
              }
              // dist to the box surface: min face gap inside, norm of the
              // per-axis overshoot outside
              const double dist = inside ? din : std::sqrt(out2);
              if (dist >= width) continue;
              if (!inside && side == StripSide::Inner) continue;
              double q = 0;
              for (int c = 0; c < u.ncomp; ++c) {
                const double v = evalField(u, x, c);
                q += v * v;
              }
              s += subvol * q;
            }
      }
  return s;
}

double stripL2Sq(const Field& u, double width) {
  return stripL2Sq(u, u.grid, width, StripSide::Inner);
}

double friedrichsRatio(const Field& u) {
  double diam2 = 0;
  for (int j = 0; j < u.grid.dim; ++j) diam2 += u.grid.extent(j) * u.grid.extent(j);
  const double semi = normH1semi(u);
  if (semi == 0) return 0;
  return normL2(u) / (std::sqrt(diam2) * semi);
}

}  // namespace homog::fem
