#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "qpnet/activation.hpp"
#include "qpnet/encoder.hpp"
#include "qpnet/linalg.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Projected one-layer architectures. A neuron carries the post-projection
// finite parameters directly: h stands in for phi o Pi_N, B for
// Pi_N A Pi_N and y for Pi_N b. The forward pass sums neurons in index
// order so reruns are bit-identical.
// ---------------------------------------------------------------------------

struct NeuronParams {
  Vec h;  // length N
  Mat B;  // N x N
  Vec y;  // length N
};

struct ScalarNet {
  std::size_t truncation = 0;
  std::vector<NeuronParams> neurons;
  ActivationSpec activation;
  std::shared_ptr<const EncoderSpec> encoder;  // may be null when fed cube points directly

  void validate() const;
};

struct VectorNet {
  std::vector<ScalarNet> components;  // share encoder and truncation
  std::vector<Vec> out_vectors;       // one length-K coefficient vector per component

  void validate() const;
  std::size_t out_dim() const { return out_vectors.empty() ? 0 : out_vectors[0].size(); }
};

double forward_scalar(const ScalarNet& net, const CubePoint& z);

// Lambda_{N'} on parameters: h, y, psi, u_plus truncated to the leading N'
// entries and B to its leading N' x N' block. N' = N returns an
// output-identical net.
ScalarNet project_params(const ScalarNet& net, std::size_t n_prime);

Vec forward_vector(const VectorNet& vnet, const CubePoint& z);

// Pi^E_{K'} in basis coordinates: keep the first K' coefficients.
Vec truncate_target(const Vec& v, std::size_t k_prime);

// Random init. The all-zero point is stationary (beta(0) = 0 kills the
// gradient), so entries are drawn h ~ U(-1/sqrt(JN), 1/sqrt(JN)),
// B ~ N(0, 1/N), y ~ U(-0.5, 0.5).
ScalarNet init_scalar_net(std::size_t truncation, std::size_t neuron_count,
                          ActivationSpec activation,
                          std::shared_ptr<const EncoderSpec> encoder, std::mt19937_64& g);

VectorNet init_vector_net(std::size_t truncation, std::size_t neuron_count,
                          std::size_t component_count, std::size_t out_dim,
                          const ActivationSpec& activation,
                          std::shared_ptr<const EncoderSpec> encoder, std::mt19937_64& g);

}  // namespace qpnet
