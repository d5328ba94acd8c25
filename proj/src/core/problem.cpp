#include "core/problem.hpp"

#include <fstream>

#include "core/raster.hpp"

namespace homog {

using nlohmann::json;

namespace {

model::Lattice latticeFromJson(const json& j) {
  if (j.contains("basis")) {
    const auto& rows = j.at("basis");
    const int d = static_cast<int>(rows.size());
    Mat basis(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) basis(i, k) = rows.at(i).at(k).get<double>();
    return model::Lattice::fromBasis(basis);
  }
  return model::Lattice::cubic(j.at("dim").get<int>());
}

model::Symbol symbolFromJson(const json& j, int dim) {
  const std::string preset = j.value("preset", "grad");
  if (preset == "grad") return model::Symbol::gradient(dim);
  if (preset == "elasticity2d") {
    if (dim != 2) throw std::invalid_argument("elasticity2d symbol needs dim 2");
    return model::Symbol::elasticity2d();
  }
  if (preset == "custom") {
    const auto& bs = j.at("b");
    if (static_cast<int>(bs.size()) != dim)
      throw std::invalid_argument("custom symbol needs one matrix per axis");
    std::vector<CMat> b;
    const json* bi = j.contains("b_imag") ? &j.at("b_imag") : nullptr;
    for (int l = 0; l < dim; ++l) {
      const auto& rows = bs.at(l);
      const int m = static_cast<int>(rows.size());
      const int n = static_cast<int>(rows.at(0).size());
      CMat bl(m, n);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
          double re = rows.at(r).at(c).get<double>();
          double im = bi ? bi->at(l).at(r).at(c).get<double>() : 0.0;
          bl(r, c) = std::complex<double>(re, im);
        }
      b.push_back(std::move(bl));
    }
    return model::Symbol::custom(dim, std::move(b));
  }
  throw std::invalid_argument("unknown symbol preset: " + preset);
}

model::Coefficient coefficientFromJson(const json& j, int dim, int m);

model::Coefficient scalarProfileFromJson(const json& j, int dim) {
  return coefficientFromJson(j, dim, 1);
}

model::Coefficient coefficientFromJson(const json& j, int dim, int m) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "constant") {
    const auto& v = j.at("value");
    if (v.is_number()) {
      return model::Coefficient::constant(dim, v.get<double>() * Mat::Identity(m, m));
    }
    const int r = static_cast<int>(v.size());
    Mat value(r, r);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k) value(i, k) = v.at(i).at(k).get<double>();
    return model::Coefficient::constant(dim, std::move(value));
  }
  if (family == "laminate")
    return model::Coefficient::laminate(dim, m, j.at("a").get<double>(), j.at("b").get<double>(),
                                        j.value("fraction", 0.5));
  if (family == "checkerboard") {
    if (dim != 2) throw std::invalid_argument("checkerboard needs dim 2");
    return model::Coefficient::checkerboard(m, j.at("a").get<double>(), j.at("b").get<double>());
  }
  if (family == "trig") {
    Vec amps(dim);
    const auto& a = j.at("amps");
    for (int i = 0; i < dim; ++i) amps[i] = a.at(i).get<double>();
    return model::Coefficient::trig(dim, m, j.at("base").get<double>(), std::move(amps));
  }
  if (family == "raster") {
    const RasterData r = readRaster(j.at("path").get<std::string>());
    if (r.rows != r.cols) throw std::invalid_argument("coefficient raster blocks must be square");
    if (r.dim != dim) throw std::invalid_argument("raster dim mismatch");
    std::vector<Mat> cells(r.points());
    for (long p = 0; p < r.points(); ++p) {
      Mat g(r.rows, r.cols);
      for (int i = 0; i < r.rows; ++i)
        for (int k = 0; k < r.cols; ++k) g(i, k) = r.data[(p * r.rows + i) * r.cols + k];
      cells[p] = std::move(g);
    }
    return model::Coefficient::raster(dim, r.dims, std::move(cells));
  }
  if (family == "elasticity") {
    std::shared_ptr<model::Coefficient> mod;
    if (j.contains("modulation"))
      mod = std::make_shared<model::Coefficient>(scalarProfileFromJson(j.at("modulation"), dim));
    return model::Coefficient::elasticity(j.at("mu").get<double>(), j.at("lambda").get<double>(),
                                          std::move(mod));
  }
  throw std::invalid_argument("unknown coefficient family: " + family);
}

}  // namespace

Problem problemFromJson(const json& j) {
  Problem p;
  p.lattice = latticeFromJson(j.at("lattice"));
  p.symbol = symbolFromJson(j.at("symbol"), p.lattice.dim());
  p.coefficient = coefficientFromJson(j.at("coefficient"), p.lattice.dim(), p.symbol.rows());
  if (p.coefficient.rows() != p.symbol.rows())
    throw std::invalid_argument("coefficient rows must match symbol rows");
  p.bounds = p.symbol.ellipticityBounds();
  return p;
}

Problem problemFromFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open problem file: " + path);
  json j;
  f >> j;
  return problemFromJson(j);
}

}  // namespace homog
