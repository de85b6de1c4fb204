#include "qpnet/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "qpnet/rng.hpp"

namespace qpnet {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;
}

void FamilySpec::validate() const {
  if (!(bound > 0.0)) throw std::invalid_argument("FamilySpec: bound must be positive");
  if (grid < 2) throw std::invalid_argument("FamilySpec: grid must have >= 2 points");
  if (count < 1) throw std::invalid_argument("FamilySpec: count must be >= 1");
}

Dataset gen_fourier_family(const FamilySpec& spec) {
  spec.validate();
  Dataset ds;
  ds.meta.family = "fourier";
  ds.meta.modes = spec.modes;
  ds.meta.bound = spec.bound;
  ds.meta.grid = spec.grid;
  ds.meta.count = spec.count;
  ds.meta.seed = spec.seed;

  Vec grid(spec.grid);
  for (std::size_t j = 0; j < spec.grid; ++j)
    grid[j] = static_cast<double>(j) / static_cast<double>(spec.grid - 1);

  ds.records.reserve(spec.count);
  for (std::size_t rec = 0; rec < spec.count; ++rec) {
    std::mt19937_64 g(derive_seed(spec.seed, rec));
    double a0 = uniform(g, -spec.bound, spec.bound);
    Vec ak(spec.modes), bk(spec.modes);
    for (std::size_t k = 1; k <= spec.modes; ++k) {
      double c = spec.bound / static_cast<double>(k * k);
      ak[k - 1] = uniform(g, -c, c);
      bk[k - 1] = uniform(g, -c, c);
    }
    Record r;
    r.id = "r" + std::to_string(rec);
    r.x.grid = grid;
    r.x.values.resize(spec.grid);
    for (std::size_t j = 0; j < spec.grid; ++j) {
      double t = grid[j];
      double v = a0;
      for (std::size_t k = 1; k <= spec.modes; ++k) {
        double w = kTwoPi * static_cast<double>(k) * t;
        v += ak[k - 1] * std::cos(w) + bk[k - 1] * std::sin(w);
      }
      r.x.values[j] = v;
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

void attach_target(Dataset& ds, const TargetSpec& target) {
  if (target.kind == TargetKind::PointEval && (target.t0 < 0.0 || target.t0 > 1.0))
    throw std::invalid_argument("attach_target: t0 outside [0,1]");
  for (auto& r : ds.records) {
    r.scalar_target.reset();
    r.vector_target.reset();
    r.function_target.reset();
    switch (target.kind) {
      case TargetKind::None:
        break;
      case TargetKind::Integral:
        r.scalar_target = trapezoid(r.x);
        break;
      case TargetKind::PointEval:
        r.scalar_target = r.x.value_at(target.t0);
        break;
      case TargetKind::SquareIntegral:
        r.scalar_target = trapezoid_squared(r.x);
        break;
      case TargetKind::SquareOperator: {
        FunctionSample y;
        y.grid = r.x.grid;
        y.values.resize(r.x.values.size());
        for (std::size_t j = 0; j < y.values.size(); ++j)
          y.values[j] = r.x.values[j] * r.x.values[j];
        r.function_target = std::move(y);
        break;
      }
    }
  }
  ds.meta.target = target_kind_name(target.kind);
}

std::string target_kind_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::None: return "none";
    case TargetKind::Integral: return "integral";
    case TargetKind::PointEval: return "point_eval";
    case TargetKind::SquareIntegral: return "square_integral";
    case TargetKind::SquareOperator: return "square_operator";
  }
  throw std::logic_error("target_kind_name: bad kind");
}

TargetKind target_kind_from_name(const std::string& name) {
  if (name == "none") return TargetKind::None;
  if (name == "integral") return TargetKind::Integral;
  if (name == "point_eval") return TargetKind::PointEval;
  if (name == "square_integral") return TargetKind::SquareIntegral;
  if (name == "square_operator") return TargetKind::SquareOperator;
  throw std::invalid_argument("unknown target kind: " + name);
}

}  // namespace qpnet
