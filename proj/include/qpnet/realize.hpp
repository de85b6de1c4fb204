#pragma once

#include <memory>
#include <vector>

#include "qpnet/net.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Zero-padding embeddings of finite parameter blocks into larger truncations,
// the realization map from flat parameter vectors to evaluable functions,
// and the Lipschitz stability bound of the realization operator.
// ---------------------------------------------------------------------------

// Flat parameter vector of length (N^2 + 2N) * J, laid out per neuron as
// h | B row-major | y.
struct ParamPoint {
  std::size_t truncation = 0;    // N
  std::size_t neuron_count = 0;  // J
  Vec theta;

  void validate() const;
  static std::size_t expected_length(std::size_t n, std::size_t j) {
    return (n * n + 2 * n) * j;
  }
};

// Zero-padded copies; entries with index > N are exactly zero.
Vec ext1(const Vec& h, std::size_t m);
Mat ext2(const Mat& beta, std::size_t m);
Vec ext3(const Vec& y, std::size_t m);

ParamPoint pack_params(const ScalarNet& net);
std::vector<NeuronParams> unpack_params(const ParamPoint& p);

// Pads every neuron of the net (and the activation internals) to dimension m.
ScalarNet pad_net(const ScalarNet& net, std::size_t m);

// R_J o Ext applied to a flat parameter point: the function
// x -> sum_j < h_j, sigma(B_j F(x) + y_j) >. Evaluation delegates to
// forward_scalar so padded/projected identities are exact equalities.
struct RealizedMap {
  ScalarNet net;

  double eval_encoded(const CubePoint& z) const { return forward_scalar(net, z); }
  double operator()(const FunctionSample& x) const;
};

RealizedMap realize(const ParamPoint& theta, ActivationSpec act,
                    std::shared_ptr<const EncoderSpec> enc);

struct StabilityPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Single-neuron realization stability: for each encoded input z,
//   lhs = |R1(p)(z) - R1(pbar)(z)|
//   rhs = |h - hbar| max_z |sigma(B z + y)|
//       + Lip(sigma) |hbar| (|B - Bbar|_F |z| + |y - ybar|),
// with the operator norm bounded above by the Frobenius norm.
std::vector<StabilityPair> stability_check(const NeuronParams& p, const NeuronParams& p_bar,
                                           const std::vector<CubePoint>& inputs,
                                           const ActivationSpec& act);

}  // namespace qpnet
