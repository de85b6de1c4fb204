#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qpnet/net.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// MSE loss, hand-derived reverse-mode gradients for the one-layer rank-one
// architecture, a central-difference oracle, and first-order optimizers.
// Everything is deterministic given the seed: fixed shuffle, fixed
// summation order.
// ---------------------------------------------------------------------------

struct ScalarSample {
  CubePoint z;
  double target = 0.0;
};

struct VectorSample {
  CubePoint z;
  Vec target;
};

struct SgdConfig {
  double lr = 1e-3;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  std::variant<SgdConfig, AdamConfig> optimizer = AdamConfig{};
  std::size_t steps = 1;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

// Gradient shapes mirror the parameters exactly: per-component, per-neuron
// (h, B, y) blocks, plus d/d v^(m) for vector nets.
struct GradPacket {
  std::vector<std::vector<NeuronParams>> components;
  std::vector<Vec> out_vectors;     // empty for scalar nets
  bool kink_proximity = false;      // some ReluTanh preactivation within 1e-3 of 0
  double min_kink_distance = 0.0;   // min |psi . w| seen (ReluTanh only)
};

// Mean of squared errors over the batch; vector targets contribute the
// squared Euclidean norm of the residual.
double loss_mse(const ScalarNet& net, const std::vector<ScalarSample>& batch);
double loss_mse(const VectorNet& vnet, const std::vector<VectorSample>& batch);

GradPacket grad(const ScalarNet& net, const std::vector<ScalarSample>& batch);
GradPacket grad(const VectorNet& vnet, const std::vector<VectorSample>& batch);

struct FdReport {
  double max_rel_err = 0.0;
  std::string worst_component;
  bool refused = false;  // batch too close to a ReluTanh kink for the oracle
  double min_kink_distance = 0.0;
};

// Central differences per parameter component against the analytic gradient.
// Relative errors use denominators clamped at 1e-8.
FdReport fd_check(const ScalarNet& net, const std::vector<ScalarSample>& batch, double step);
FdReport fd_check(const VectorNet& vnet, const std::vector<VectorSample>& batch, double step);

struct FitResult {
  std::vector<double> loss_history;  // batch loss at the params of each step
  bool diverged = false;
  std::size_t divergence_step = 0;
};

// Trains in place. On a non-finite loss or update the step is not applied
// and the result reports the offending step index.
FitResult fit(ScalarNet& net, const std::vector<ScalarSample>& data, const TrainConfig& cfg);
FitResult fit(VectorNet& vnet, const std::vector<VectorSample>& data, const TrainConfig& cfg);

}  // namespace qpnet
