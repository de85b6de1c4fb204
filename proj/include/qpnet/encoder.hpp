#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "qpnet/function_sample.hpp"
#include "qpnet/linalg.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Separating-sequence encoders into the Hilbert cube
//     Q = { a in l2 : 0 <= a_i <= 1/i }.
// Coordinate i of the embedding is (phi(h_i(x)) + 1) / (2i) where the h_i
// are the encoder's raw separating functions and phi squashes into [-1,1].
// ---------------------------------------------------------------------------

enum class NormalizerKind { Atan, Tanh };

// Strictly increasing 1-1 squash R -> [-1,1]. Output is clamped so the
// cube bounds hold exactly even when libm overshoots by one ulp.
struct Normalizer {
  NormalizerKind kind = NormalizerKind::Atan;
  double operator()(double t) const;
};

// Continuous, strictly increasing, identity on [-1/2,1/2], |chi| <= 1.
// Outside the identity band: sign(t) * (1/2 + tanh(2(|t|-1/2))/2).
struct ChiSpec {
  double operator()(double t) const;
};

struct CubePoint {
  Vec coords;

  std::size_t size() const { return coords.size(); }
  double norm() const { return norm2(coords); }
};

struct CubeReport {
  bool ok = true;
  std::vector<std::size_t> violations;  // 1-based coordinate indices
  double norm = 0.0;
};

enum class MetricKind { L2, Sup };

// h_i(x) = x(s_i), point evaluation by linear interpolation.
struct PointEvalEncoder {
  Vec sites;
  Normalizer normalizer;
};

// h_i(x) = rho(x, d_i) against stored landmark functions.
struct MetricLandmarkEncoder {
  std::vector<FunctionSample> landmarks;
  MetricKind metric = MetricKind::L2;
  Normalizer normalizer;
};

// h_i(x) = sum_k w_{i,k} x(grid_k); weight length must match the sample grid.
struct LinearFunctionalEncoder {
  std::vector<Vec> weights;
  Normalizer normalizer;
};

// Convexity-preserving variant: coordinate n is
// (chi(delta_n(fbar_n(x))) + 1) / (2n) with delta_n(t) = (t-b_n)/(b_n-a_n) + 1/2.
// Ranges must be the images [a_n, b_n] of fbar_n on the working convex set
// for the embedding to be exactly affine there.
struct ConvexPreservingEncoder {
  std::vector<Vec> functionals;
  std::vector<std::pair<double, double>> ranges;  // (a_n, b_n), a_n < b_n
  ChiSpec kink_gate;
  bool ranges_estimated = false;  // true when ranges came from data, not exact images
};

using EncoderSpec = std::variant<PointEvalEncoder, MetricLandmarkEncoder,
                                 LinearFunctionalEncoder, ConvexPreservingEncoder>;

// Number of separating functions this spec can realize.
std::size_t encoder_capacity(const EncoderSpec& spec);

// Raw h_i(x) before squashing, i in [1, capacity].
double encoder_raw(const EncoderSpec& spec, const FunctionSample& x, std::size_t i);

CubePoint encode(const EncoderSpec& spec, const FunctionSample& x, std::size_t n);

// Pullback of the l2 distance through truncated encoding.
double pseudometric(const EncoderSpec& spec, const FunctionSample& x,
                    const FunctionSample& y, std::size_t n);

// Worst-case l2 mass of all cube coordinates beyond n: sqrt(1/n),
// since sum_{i>n} 1/i^2 < 1/n.
double tail_bound(std::size_t n);

// Checks 0 <= z_i <= 1/i per coordinate and |z| <= pi/sqrt(6) + 1e-12.
CubeReport verify_cube(const CubePoint& z);

// PointEval encoder over [lo, hi] with coarse-to-fine dyadic site ordering:
// lo, hi, midpoint, quarter points, ...
EncoderSpec dyadic_point_eval(std::size_t count, double lo = 0.0, double hi = 1.0,
                              Normalizer normalizer = {});

// LinearFunctional encoder whose functionals are trapezoid-weighted Fourier
// coefficient reads on a fixed uniform grid over [0,1]:
// mean, then cos/sin pairs in increasing frequency. The coarse-to-fine
// ordering mirrors a Schauder coefficient expansion.
EncoderSpec fourier_functionals(std::size_t count, std::size_t grid,
                                Normalizer normalizer = {});

// Estimate ConvexPreserving ranges as min/max of each functional over a
// training set; marks the encoder as estimated.
void estimate_ranges(ConvexPreservingEncoder& enc, const std::vector<FunctionSample>& data);

}  // namespace qpnet
