#pragma once

#include <array>
#include <string>
#include <vector>

namespace homog {

/*! Binary block-raster file.
 *
 *  Layout (little endian):
 *    uint32 dim, uint32 rows, uint32 cols, uint32 dims[dim]
 *    float64 data[prod(dims) * rows * cols]
 *  Grid points run row major (axis 0 slowest), each point carries a
 *  row-major rows x cols block.  Coefficient rasters require rows == cols;
 *  corrector dumps use rows = n, cols = m.
 */
struct RasterData {
  int dim = 0;
  int rows = 0, cols = 0;
  std::array<long, 3> dims{1, 1, 1};
  std::vector<double> data;

  long points() const {
    long p = 1;
    for (int j = 0; j < dim; ++j) p *= dims[j];
    return p;
  }
};

void writeRaster(const std::string& path, const RasterData& r);
RasterData readRaster(const std::string& path);

}  // namespace homog
