#pragma once

#include <array>
#include <vector>

namespace homog::fem {

/*! Uniform tensor-product grid, axis-aligned.  Torus grids wrap and store
 *  cells[j] nodes per axis; box grids store cells[j] + 1 with the outer
 *  layers forming the boundary.  Node storage is row major, axis 0 slowest.
 */
struct Grid {
  int dim = 0;
  bool periodic = false;
  std::array<long, 3> cells{1, 1, 1};
  std::array<double, 3> h{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};

  static Grid torus(int dim, std::array<long, 3> cells, std::array<double, 3> extent,
                    std::array<double, 3> origin = {0, 0, 0});
  static Grid box(int dim, std::array<long, 3> cells, std::array<double, 3> extent,
                  std::array<double, 3> origin = {0, 0, 0});

  long nodesAxis(int j) const { return periodic ? cells[j] : cells[j] + 1; }
  long nodeCount() const {
    long n = 1;
    for (int j = 0; j < dim; ++j) n *= nodesAxis(j);
    return n;
  }
  long cellCount() const {
    long n = 1;
    for (int j = 0; j < dim; ++j) n *= cells[j];
    return n;
  }
  double extent(int j) const { return cells[j] * h[j]; }
  double nodeCoord(int j, long i) const { return origin[j] + i * h[j]; }

  long wrapNode(int j, long i) const {
    if (!periodic) return i;
    const long n = cells[j];
    i %= n;
    return i < 0 ? i + n : i;
  }

  bool sameShape(const Grid& o) const;
  // nested coarsening by 2 (cells halved); requires even cell counts
  Grid coarsened() const;
};

/*! Nodal field with ncomp interleaved components. */
struct Field {
  Grid grid;
  int ncomp = 1;
  std::vector<double> data;

  Field() = default;
  Field(const Grid& g, int nc) : grid(g), ncomp(nc), data(g.nodeCount() * nc, 0.0) {}

  double& at(long node, int c) { return data[node * ncomp + c]; }
  double at(long node, int c) const { return data[node * ncomp + c]; }
  long nodes() const { return grid.nodeCount(); }
};

// multilinear interpolation; torus fields wrap, box fields clamp to the carrier
double evalField(const Field& f, const double* x, int comp);

// gradient of the multilinear interpolant at x (piecewise per element);
// fills grad[0..dim-1]
void evalFieldGradient(const Field& f, const double* x, int comp, double* grad);

// nodal injection onto the coarsened grid (factor 2, nested)
Field restrictHalf(const Field& f);

// node-averaged element-mean gradients; output has ncomp * dim components,
// gradient axis fastest
Field nodalGradients(const Field& f);

}  // namespace homog::fem
