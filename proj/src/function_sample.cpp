#include "qpnet/function_sample.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpnet {

void FunctionSample::validate() const {
  if (grid.empty()) throw std::invalid_argument("FunctionSample: empty grid");
  if (grid.size() != values.size())
    throw std::invalid_argument("FunctionSample: grid/values length mismatch");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i]))
      throw std::invalid_argument("FunctionSample: grid not strictly increasing");
}

double FunctionSample::value_at(double t) const {
  if (grid.empty()) throw std::invalid_argument("FunctionSample: empty grid");
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  std::size_t lo = hi - 1;
  double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

double trapezoid(const FunctionSample& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < f.grid.size(); ++i)
    s += 0.5 * (f.values[i - 1] + f.values[i]) * (f.grid[i] - f.grid[i - 1]);
  return s;
}

double trapezoid_squared(const FunctionSample& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < f.grid.size(); ++i) {
    double a = f.values[i - 1] * f.values[i - 1];
    double b = f.values[i] * f.values[i];
    s += 0.5 * (a + b) * (f.grid[i] - f.grid[i - 1]);
  }
  return s;
}

Vec resample(const FunctionSample& g, const Vec& grid) {
  Vec out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = g.value_at(grid[i]);
  return out;
}

}  // namespace qpnet
