#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qkdv/coefficients.hpp"
#include "qkdv/grid.hpp"

namespace qkdv {

using Params = std::map<std::string, double>;

// A registered coefficient family with default grid and data.
struct Problem {
  std::string id;
  std::string description;
  CoefficientSet coeffs;
  GridSpec grid;
  std::function<Field(const GridSpec&)> initial;
  // Empty when unforced.
  std::function<Field(const GridSpec&, double t)> forcing;
  // Expected to satisfy the symmetry, ellipticity and decay assumptions.
  bool compliant = true;
};

std::vector<std::string> problem_ids();
// Unknown id or parameter -> UsageError.
Problem make_problem(const std::string& id, const Params& params = {});

// (x, t) -> (-x, -t): a(-x), -b(-x), c(-x), -d(-x) with the state arguments
// u' flipped in sign.
CoefficientSet time_reversed(const CoefficientSet& cs);

// exp(-(x - x0)^2 / (2 sigma^2)) scaled by amp, on every component.
Field gaussian(const GridSpec& grid, double amp, double sigma, double x0 = 0.0);

}  // namespace qkdv
