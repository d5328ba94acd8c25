#include "core/extension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homog::fem {

double quinticRamp(double s) {
  if (s <= 0) return 1.0;
  if (s >= 1) return 0.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double boundaryCutoff(double dist, double width) {
  if (dist >= width) return 0.0;
  return quinticRamp(dist / width);
}

double boundaryDistance(const Grid& g, const double* x) {
  double d = 0;
  bool first = true;
  for (int j = 0; j < g.dim; ++j) {
    const double lo = x[j] - g.origin[j];
    const double hi = g.origin[j] + g.extent(j) - x[j];
    const double dj = std::min(lo, hi);
    d = first ? dj : std::min(d, dj);
    first = false;
  }
  return std::max(d, 0.0);
}

double outsideDistance(const Grid& g, const double* x) {
  double d = 0;
  for (int j = 0; j < g.dim; ++j) {
    const double below = g.origin[j] - x[j];
    const double above = x[j] - (g.origin[j] + g.extent(j));
    d = std::max(d, std::max(below, above));
  }
  return std::max(d, 0.0);
}

namespace {

// reflection along one axis; u is a box field, output box has 2*pad more cells
Field extendAxis(const Field& u, int axis, long pad) {
  const Grid& g = u.grid;
  Grid ng = g;
  ng.cells[axis] += 2 * pad;
  ng.origin[axis] -= pad * g.h[axis];
  Field out(ng, u.ncomp);

  const long n = g.cells[axis];  // u has n + 1 nodes along axis
  const int d = g.dim;
  long on[3] = {1, 1, 1}, nn[3] = {1, 1, 1};
  for (int j = 0; j < d; ++j) {
    on[j] = g.nodesAxis(j);
    nn[j] = ng.nodesAxis(j);
  }
  const long ostr[3] = {d > 1 ? on[1] * (d > 2 ? on[2] : 1) : 1, d > 2 ? on[2] : 1, 1};
  const long nstr[3] = {d > 1 ? nn[1] * (d > 2 ? nn[2] : 1) : 1, d > 2 ? nn[2] : 1, 1};

  // line index i along `axis` of the output maps to source combination
  //   i' = i - pad in [0, n]          : copy
  //   i < pad, t = pad - i            : 3 u(t) - 2 u(min(2t, n))
  //   i > pad + n, t = i - pad - n    : 3 u(n - t) - 2 u(max(n - 2t, 0))
  long outer[3];
  for (outer[0] = 0; outer[0] < (axis == 0 ? 1 : nn[0]); ++outer[0])
    for (outer[1] = 0; outer[1] < (axis == 1 || d < 2 ? 1 : nn[1]); ++outer[1])
      for (outer[2] = 0; outer[2] < (axis == 2 || d < 3 ? 1 : nn[2]); ++outer[2]) {
        long obase = 0, nbase = 0;
        for (int j = 0; j < d; ++j) {
          if (j == axis) continue;
          obase += outer[j] * ostr[j];
          nbase += outer[j] * nstr[j];
        }
        for (long i = 0; i < nn[axis]; ++i) {
          const long dst = nbase + i * nstr[axis];
          const long ip = i - pad;
          for (int c = 0; c < u.ncomp; ++c) {
            double v;
            if (ip >= 0 && ip <= n) {
              v = u.at(obase + ip * ostr[axis], c);
            } else if (ip < 0) {
              const long t = -ip;
              v = 3 * u.at(obase + t * ostr[axis], c) -
                  2 * u.at(obase + std::min(2 * t, n) * ostr[axis], c);
            } else {
              const long t = ip - n;
              v = 3 * u.at(obase + (n - t) * ostr[axis], c) -
                  2 * u.at(obase + std::max(n - 2 * t, 0L) * ostr[axis], c);
            }
            out.at(dst, c) = v;
          }
        }
      }
  return out;
}

}  // namespace

Field hestenesExtend(const Field& u, long pad) {
  if (u.grid.periodic) throw std::invalid_argument("extension applies to box fields");
  for (int j = 0; j < u.grid.dim; ++j)
    if (pad < 1 || pad > u.grid.cells[j])
      throw std::invalid_argument("extension margin must be between 1 and the cell count");
  Field out = u;
  for (int j = 0; j < u.grid.dim; ++j) out = extendAxis(out, j, pad);
  return out;
}

void taperExtension(Field& ext, const Grid& original, long pad) {
  const Grid& g = ext.grid;
  const double width = pad * original.h[0];
  double x[3] = {0, 0, 0};
  long idx[3] = {0, 0, 0};
  const long n0 = g.nodesAxis(0);
  const long n1 = g.dim > 1 ? g.nodesAxis(1) : 1;
  const long n2 = g.dim > 2 ? g.nodesAxis(2) : 1;
  for (idx[0] = 0; idx[0] < n0; ++idx[0])
    for (idx[1] = 0; idx[1] < n1; ++idx[1])
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        for (int j = 0; j < g.dim; ++j) x[j] = g.nodeCoord(j, idx[j]);
        const double dist = outsideDistance(original, x);
        if (dist <= 0) continue;
        const double chi = quinticRamp((dist - width / 2) / (width / 2));
        const long node = (idx[0] * n1 + (g.dim > 1 ? idx[1] : 0)) * n2 + (g.dim > 2 ? idx[2] : 0);
        for (int c = 0; c < ext.ncomp; ++c) ext.at(node, c) *= chi;
      }
}

Field extendTapered(const Field& u, long pad) {
  Field out = hestenesExtend(u, pad);
  taperExtension(out, u.grid, pad);
  return out;
}

}  // namespace homog::fem
