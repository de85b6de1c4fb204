#pragma once

#include <string>

#include "qpnet/linalg.hpp"

namespace qpnet {

// Finite representation of an input function: values on a strictly
// increasing grid. Evaluation between sites is linear interpolation,
// clamped to the end values outside the grid.
struct FunctionSample {
  Vec grid;
  Vec values;

  void validate() const;
  double value_at(double t) const;
};

// Trapezoid rule over the full grid.
double trapezoid(const FunctionSample& f);

// Trapezoid rule applied to the squared values.
double trapezoid_squared(const FunctionSample& f);

// Resample g onto the given grid by linear interpolation.
Vec resample(const FunctionSample& g, const Vec& grid);

}  // namespace qpnet
