#include "mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace homog::fem {

static void checkShape(int dim, const std::array<long, 3>& cells) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be 1..3");
  for (int j = 0; j < dim; ++j)
    if (cells[j] < 1) throw std::invalid_argument("grid needs at least one cell per axis");
}

Grid Grid::torus(int dim, std::array<long, 3> cells, std::array<double, 3> extent,
                 std::array<double, 3> origin) {
  checkShape(dim, cells);
  Grid g;
  g.dim = dim;
  g.periodic = true;
  g.cells = cells;
  g.origin = origin;
  for (int j = 0; j < dim; ++j) {
    if (!(extent[j] > 0)) throw std::invalid_argument("grid extent must be positive");
    g.h[j] = extent[j] / cells[j];
  }
  return g;
}

Grid Grid::box(int dim, std::array<long, 3> cells, std::array<double, 3> extent,
               std::array<double, 3> origin) {
  Grid g = torus(dim, cells, extent, origin);
  g.periodic = false;
  return g;
}

bool Grid::sameShape(const Grid& o) const {
  if (dim != o.dim || periodic != o.periodic) return false;
  for (int j = 0; j < dim; ++j)
    if (cells[j] != o.cells[j]) return false;
  return true;
}

Grid Grid::coarsened() const {
  Grid g = *this;
  for (int j = 0; j < dim; ++j) {
    if (cells[j] % 2 != 0) throw std::invalid_argument("coarsening needs even cell counts");
    g.cells[j] = cells[j] / 2;
    g.h[j] = h[j] * 2;
  }
  return g;
}

double evalField(const Field& f, const double* x, int comp) {
  const Grid& g = f.grid;
  long e[3] = {0, 0, 0};
  double t[3] = {0, 0, 0};
  for (int j = 0; j < g.dim; ++j) {
    double s = (x[j] - g.origin[j]) / g.h[j];
    if (g.periodic) {
      s -= std::floor(s / g.cells[j]) * g.cells[j];
      e[j] = static_cast<long>(std::floor(s));
      if (e[j] >= g.cells[j]) e[j] = g.cells[j] - 1;
    } else {
      if (s < 0) s = 0;
      if (s > g.cells[j]) s = static_cast<double>(g.cells[j]);
      e[j] = static_cast<long>(std::floor(s));
      if (e[j] >= g.cells[j]) e[j] = g.cells[j] - 1;
    }
    t[j] = s - e[j];
  }
  const long n1 = g.dim > 1 ? g.nodesAxis(1) : 1;
  const long n2 = g.dim > 2 ? g.nodesAxis(2) : 1;
  double val = 0;
  const int corners = 1 << g.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    long idx[3] = {e[0], e[1], e[2]};
    for (int j = 0; j < g.dim; ++j) {
      const int bit = (c >> j) & 1;
      w *= bit ? t[j] : 1 - t[j];
      idx[j] = g.wrapNode(j, e[j] + bit);
    }
    const long node = (idx[0] * n1 + (g.dim > 1 ? idx[1] : 0)) * n2 + (g.dim > 2 ? idx[2] : 0);
    val += w * f.at(node, comp);
  }
  return val;
}

void evalFieldGradient(const Field& f, const double* x, int comp, double* grad) {
  const Grid& g = f.grid;
  long e[3] = {0, 0, 0};
  double t[3] = {0, 0, 0};
  for (int j = 0; j < g.dim; ++j) {
    double s = (x[j] - g.origin[j]) / g.h[j];
    if (g.periodic) {
      s -= std::floor(s / g.cells[j]) * g.cells[j];
    } else {
      if (s < 0) s = 0;
      if (s > g.cells[j]) s = static_cast<double>(g.cells[j]);
    }
    e[j] = static_cast<long>(std::floor(s));
    if (e[j] >= g.cells[j]) e[j] = g.cells[j] - 1;
    t[j] = s - e[j];
  }
  const long n1 = g.dim > 1 ? g.nodesAxis(1) : 1;
  const long n2 = g.dim > 2 ? g.nodesAxis(2) : 1;
  for (int a = 0; a < g.dim; ++a) grad[a] = 0;
  const int corners = 1 << g.dim;
  for (int c = 0; c < corners; ++c) {
    long idx[3] = {e[0], e[1], e[2]};
    for (int j = 0; j < g.dim; ++j) idx[j] = g.wrapNode(j, e[j] + ((c >> j) & 1));
    const long node = (idx[0] * n1 + (g.dim > 1 ? idx[1] : 0)) * n2 + (g.dim > 2 ? idx[2] : 0);
    const double uv = f.at(node, comp);
    for (int a = 0; a < g.dim; ++a) {
      double w = 1;
      for (int j = 0; j < g.dim; ++j) {
        const int bit = (c >> j) & 1;
        if (j == a)
          w *= (bit ? 1.0 : -1.0) / g.h[j];
        else
          w *= bit ? t[j] : 1 - t[j];
      }
      grad[a] += w * uv;
    }
  }
}

Field restrictHalf(const Field& f) {
  const Grid& g = f.grid;
  Field out(g.coarsened(), f.ncomp);
  const Grid& cg = out.grid;
  const long n1 = g.dim > 1 ? g.nodesAxis(1) : 1;
  const long n2 = g.dim > 2 ? g.nodesAxis(2) : 1;
  const long c1 = cg.dim > 1 ? cg.nodesAxis(1) : 1;
  const long c2 = cg.dim > 2 ? cg.nodesAxis(2) : 1;
  const long m0 = cg.nodesAxis(0);
  for (long i0 = 0; i0 < m0; ++i0)
    for (long i1 = 0; i1 < c1; ++i1)
      for (long i2 = 0; i2 < c2; ++i2) {
        const long coarse = (i0 * c1 + i1) * c2 + i2;
        const long fine = (2 * i0 * n1 + (g.dim > 1 ? 2 * i1 : 0)) * n2 + (g.dim > 2 ? 2 * i2 : 0);
        for (int c = 0; c < f.ncomp; ++c) out.at(coarse, c) = f.at(fine, c);
      }
  return out;
}

Field nodalGradients(const Field& f) {
  const Grid& g = f.grid;
  const int d = g.dim;
  const int nc = f.ncomp;
  Field out(g, nc * d);
  std::vector<double> weight(g.nodeCount(), 0.0);
  const long n1 = d > 1 ? g.nodesAxis(1) : 1;
  const long n2 = d > 2 ? g.nodesAxis(2) : 1;
  const int corners = 1 << d;
  long ec[3] = {g.cells[0], d > 1 ? g.cells[1] : 1, d > 2 ? g.cells[2] : 1};
  for (long e0 = 0; e0 < ec[0]; ++e0)
    for (long e1 = 0; e1 < ec[1]; ++e1)
      for (long e2 = 0; e2 < ec[2]; ++e2) {
        long nodes[8];
        for (int c = 0; c < corners; ++c) {
          long idx[3] = {e0 + ((c >> 0) & 1), e1 + ((c >> 1) & 1), e2 + ((c >> 2) & 1)};
          for (int j = 0; j < d; ++j) idx[j] = g.wrapNode(j, idx[j]);
          nodes[c] = (idx[0] * n1 + (d > 1 ? idx[1] : 0)) * n2 + (d > 2 ? idx[2] : 0);
        }
        // element-mean gradient: average of edge differences along each axis
        double grad[3][8];  // [axis][comp]
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < nc; ++c) {
            double s = 0;
            for (int q = 0; q < corners; ++q) {
              if ((q >> a) & 1) continue;
              s += f.at(nodes[q | (1 << a)], c) - f.at(nodes[q], c);
            }
            grad[a][c] = s / ((corners / 2) * g.h[a]);
          }
        for (int q = 0; q < corners; ++q) {
          weight[nodes[q]] += 1;
          for (int c = 0; c < nc; ++c)
            for (int a = 0; a < d; ++a) out.at(nodes[q], c * d + a) += grad[a][c];
        }
      }
  for (long i = 0; i < g.nodeCount(); ++i)
    for (int k = 0; k < nc * d; ++k) out.at(i, k) /= weight[i];
  return out;
}

}  // namespace homog::fem
