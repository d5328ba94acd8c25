#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "core/coefficient.hpp"
#include "core/constants.hpp"
#include "core/lattice.hpp"
#include "core/symbol.hpp"

namespace homog {

/*! A problem instance: periodicity lattice, differential symbol, coefficient.
 *  Ellipticity bounds are computed once at construction.
 */
struct Problem {
  model::Lattice lattice = model::Lattice::cubic(1);
  model::Symbol symbol = model::Symbol::gradient(1);
  model::Coefficient coefficient =
      model::Coefficient::constant(1, Mat::Identity(1, 1));
  model::Symbol::Bounds bounds{1.0, 1.0};

  int dim() const { return lattice.dim(); }

  model::Constants constants(std::optional<double> domain_diam = std::nullopt) const {
    return model::makeConstants(lattice, symbol, bounds, coefficient, domain_diam);
  }
};

// descriptor schema: { "lattice": {...}, "symbol": {...}, "coefficient": {...} }
Problem problemFromJson(const nlohmann::json& j);
Problem problemFromFile(const std::string& path);

}  // namespace homog
