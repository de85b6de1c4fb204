#include "qpnet/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpnet {

namespace {
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPiOverSqrt6 = 1.28254983016186409554;  // pi/sqrt(6)

double clamp_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }
}  // namespace

double Normalizer::operator()(double t) const {
  switch (kind) {
    case NormalizerKind::Atan:
      return clamp_unit(kTwoOverPi * std::atan(t));
    case NormalizerKind::Tanh:
      return clamp_unit(std::tanh(t));
  }
  throw std::logic_error("Normalizer: bad kind");
}

double ChiSpec::operator()(double t) const {
  double a = std::abs(t);
  if (a <= 0.5) return t;
  double v = 0.5 + 0.5 * std::tanh(2.0 * (a - 0.5));
  return t < 0.0 ? -v : v;
}

namespace {

double landmark_distance(const FunctionSample& x, const FunctionSample& d, MetricKind metric) {
  Vec dv = resample(d, x.grid);
  switch (metric) {
    case MetricKind::Sup: {
      double m = 0.0;
      for (std::size_t k = 0; k < dv.size(); ++k) m = std::max(m, std::abs(x.values[k] - dv[k]));
      return m;
    }
    case MetricKind::L2: {
      if (x.grid.size() == 1) return std::abs(x.values[0] - dv[0]);
      double s = 0.0;
      for (std::size_t k = 1; k < x.grid.size(); ++k) {
        double a = x.values[k - 1] - dv[k - 1];
        double b = x.values[k] - dv[k];
        s += 0.5 * (a * a + b * b) * (x.grid[k] - x.grid[k - 1]);
      }
      return std::sqrt(s);
    }
  }
  throw std::logic_error("landmark_distance: bad metric");
}

double weighted_sum(const Vec& w, const FunctionSample& x) {
  if (w.size() != x.grid.size())
    throw std::invalid_argument("encoder: weight length does not match sample grid");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x.values[k];
  return s;
}

}  // namespace

std::size_t encoder_capacity(const EncoderSpec& spec) {
  return std::visit(
      [](const auto& e) -> std::size_t {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, PointEvalEncoder>) return e.sites.size();
        if constexpr (std::is_same_v<T, MetricLandmarkEncoder>) return e.landmarks.size();
        if constexpr (std::is_same_v<T, LinearFunctionalEncoder>) return e.weights.size();
        if constexpr (std::is_same_v<T, ConvexPreservingEncoder>)
          return std::min(e.functionals.size(), e.ranges.size());
      },
      spec);
}

double encoder_raw(const EncoderSpec& spec, const FunctionSample& x, std::size_t i) {
  if (i < 1 || i > encoder_capacity(spec))
    throw std::out_of_range("encoder: index out of encoder range");
  std::size_t k = i - 1;
  return std::visit(
      [&](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, PointEvalEncoder>) return x.value_at(e.sites[k]);
        if constexpr (std::is_same_v<T, MetricLandmarkEncoder>)
          return landmark_distance(x, e.landmarks[k], e.metric);
        if constexpr (std::is_same_v<T, LinearFunctionalEncoder>)
          return weighted_sum(e.weights[k], x);
        if constexpr (std::is_same_v<T, ConvexPreservingEncoder>)
          return weighted_sum(e.functionals[k], x);
      },
      spec);
}

CubePoint encode(const EncoderSpec& spec, const FunctionSample& x, std::size_t n) {
  if (n < 1) throw std::invalid_argument("encode: truncation must be >= 1");
  if (n > encoder_capacity(spec))
    throw std::out_of_range("encode: index out of encoder range");
  x.validate();

  CubePoint z;
  z.coords.resize(n);
  if (const auto* cp = std::get_if<ConvexPreservingEncoder>(&spec)) {
    for (std::size_t i = 1; i <= n; ++i) {
      auto [alpha, beta] = cp->ranges[i - 1];
      if (!(alpha < beta))
        throw std::invalid_argument("encode: convex range must satisfy alpha < beta");
      double raw = weighted_sum(cp->functionals[i - 1], x);
      double delta = (raw - beta) / (beta - alpha) + 0.5;
      double chi = clamp_unit(cp->kink_gate(delta));
      z.coords[i - 1] = (chi + 1.0) / (2.0 * static_cast<double>(i));
    }
    return z;
  }
  const Normalizer& phi = std::visit(
      [](const auto& e) -> const Normalizer& {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ConvexPreservingEncoder>)
          throw std::logic_error("unreachable");
        else
          return e.normalizer;
      },
      spec);
  for (std::size_t i = 1; i <= n; ++i) {
    double h = phi(encoder_raw(spec, x, i));
    z.coords[i - 1] = (h + 1.0) / (2.0 * static_cast<double>(i));
  }
  return z;
}

double pseudometric(const EncoderSpec& spec, const FunctionSample& x,
                    const FunctionSample& y, std::size_t n) {
  CubePoint zx = encode(spec, x, n);
  CubePoint zy = encode(spec, y, n);
  return std::sqrt(sq_dist(zx.coords, zy.coords));
}

double tail_bound(std::size_t n) {
  if (n < 1) throw std::invalid_argument("tail_bound: n must be >= 1");
  return std::sqrt(1.0 / static_cast<double>(n));
}

CubeReport verify_cube(const CubePoint& z) {
  CubeReport rep;
  for (std::size_t i = 1; i <= z.coords.size(); ++i) {
    double v = z.coords[i - 1];
    if (!(v >= 0.0 && v <= 1.0 / static_cast<double>(i))) {
      rep.ok = false;
      rep.violations.push_back(i);
    }
  }
  rep.norm = z.norm();
  if (!(rep.norm <= kPiOverSqrt6 + 1e-12)) rep.ok = false;
  return rep;
}

EncoderSpec dyadic_point_eval(std::size_t count, double lo, double hi, Normalizer normalizer) {
  if (!(lo < hi)) throw std::invalid_argument("dyadic_point_eval: need lo < hi");
  PointEvalEncoder enc;
  enc.normalizer = normalizer;
  enc.sites.reserve(count);
  if (count >= 1) enc.sites.push_back(lo);
  if (count >= 2) enc.sites.push_back(hi);
  // Then midpoints level by level: 1/2; 1/4, 3/4; 1/8, 3/8, 5/8, 7/8; ...
  for (std::size_t level = 1; enc.sites.size() < count; ++level) {
    std::size_t denom = std::size_t{1} << level;
    for (std::size_t num = 1; num < denom && enc.sites.size() < count; num += 2) {
      double t = static_cast<double>(num) / static_cast<double>(denom);
      enc.sites.push_back(lo + t * (hi - lo));
    }
  }
  return enc;
}

EncoderSpec fourier_functionals(std::size_t count, std::size_t grid, Normalizer normalizer) {
  if (grid < 3) throw std::invalid_argument("fourier_functionals: grid too small");
  LinearFunctionalEncoder enc;
  enc.normalizer = normalizer;
  const double h = 1.0 / static_cast<double>(grid - 1);
  auto trap_weight = [&](std::size_t j) {
    return (j == 0 || j == grid - 1) ? 0.5 * h : h;
  };
  for (std::size_t i = 0; i < count; ++i) {
    Vec w(grid);
    if (i == 0) {
      for (std::size_t j = 0; j < grid; ++j) w[j] = trap_weight(j);
    } else {
      std::size_t k = (i + 1) / 2;  // frequency; cos for odd i, sin for even i
      bool use_cos = (i % 2 == 1);
      for (std::size_t j = 0; j < grid; ++j) {
        double t = static_cast<double>(j) * h;
        double basis = use_cos ? std::cos(2.0 * M_PI * static_cast<double>(k) * t)
                               : std::sin(2.0 * M_PI * static_cast<double>(k) * t);
        w[j] = 2.0 * trap_weight(j) * basis;
      }
    }
    enc.weights.push_back(std::move(w));
  }
  return enc;
}

void estimate_ranges(ConvexPreservingEncoder& enc, const std::vector<FunctionSample>& data) {
  if (data.empty()) throw std::invalid_argument("estimate_ranges: empty data");
  enc.ranges.assign(enc.functionals.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < enc.functionals.size(); ++i) {
    double lo = weighted_sum(enc.functionals[i], data[0]);
    double hi = lo;
    for (const auto& x : data) {
      double v = weighted_sum(enc.functionals[i], x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < hi)) hi = lo + 1.0;  // degenerate image, widen to keep alpha < beta
    enc.ranges[i] = {lo, hi};
  }
  enc.ranges_estimated = true;
}

}  // namespace qpnet
