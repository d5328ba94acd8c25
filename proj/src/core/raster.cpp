#include "core/raster.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace homog {

void writeRaster(const std::string& path, const RasterData& r) {
  if (r.dim < 1 || r.dim > 3) throw std::invalid_argument("raster dim must be 1..3");
  const long expect = r.points() * r.rows * r.cols;
  if (static_cast<long>(r.data.size()) != expect)
    throw std::invalid_argument("raster data size mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open raster file for writing: " + path);
  auto put32 = [&](uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  put32(static_cast<uint32_t>(r.dim));
  put32(static_cast<uint32_t>(r.rows));
  put32(static_cast<uint32_t>(r.cols));
  for (int j = 0; j < r.dim; ++j) put32(static_cast<uint32_t>(r.dims[j]));
  f.write(reinterpret_cast<const char*>(r.data.data()),
          static_cast<std::streamsize>(r.data.size() * sizeof(double)));
  if (!f) throw std::runtime_error("raster write failed: " + path);
}

RasterData readRaster(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open raster file: " + path);
  auto get32 = [&]() {
    uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    if (!f) throw std::runtime_error("raster header truncated: " + path);
    return v;
  };
  RasterData r;
  r.dim = static_cast<int>(get32());
  if (r.dim < 1 || r.dim > 3) throw std::runtime_error("raster dim out of range: " + path);
  r.rows = static_cast<int>(get32());
  r.cols = static_cast<int>(get32());
  if (r.rows < 1 || r.cols < 1 || r.rows > 64 || r.cols > 64)
    throw std::runtime_error("raster block shape out of range: " + path);
  for (int j = 0; j < r.dim; ++j) r.dims[j] = static_cast<long>(get32());
  const long count = r.points() * r.rows * r.cols;
  r.data.resize(count);
  f.read(reinterpret_cast<char*>(r.data.data()),
         static_cast<std::streamsize>(count * sizeof(double)));
  if (!f) throw std::runtime_error("raster data truncated: " + path);
  return r;
}

}  // namespace homog
