#include "qpnet/net.hpp"

#include <stdexcept>

#include "qpnet/rng.hpp"

namespace qpnet {

void ScalarNet::validate() const {
  if (neurons.empty()) throw std::invalid_argument("ScalarNet: needs at least one neuron");
  for (const auto& nr : neurons) {
    if (nr.h.size() != truncation || nr.y.size() != truncation || nr.B.n != truncation)
      throw std::invalid_argument("ScalarNet: neuron dimensions inconsistent with truncation");
    if (!all_finite(nr.h) || !all_finite(nr.y) || !all_finite(nr.B.a))
      throw std::invalid_argument("ScalarNet: non-finite parameter");
  }
  std::size_t ad = activation_dim(activation);
  if (ad != 0 && ad != truncation)
    throw std::invalid_argument("ScalarNet: activation dimension != truncation");
  validate_activation(activation);
}

void VectorNet::validate() const {
  if (components.empty()) throw std::invalid_argument("VectorNet: needs at least one component");
  if (components.size() != out_vectors.size())
    throw std::invalid_argument("VectorNet: components/out_vectors count mismatch");
  std::size_t n = components[0].truncation;
  std::size_t k = out_vectors[0].size();
  for (const auto& c : components) {
    c.validate();
    if (c.truncation != n)
      throw std::invalid_argument("VectorNet: components must share truncation");
  }
  for (const auto& v : out_vectors)
    if (v.size() != k)
      throw std::invalid_argument("VectorNet: out_vectors must share length");
}

double forward_scalar(const ScalarNet& net, const CubePoint& z) {
  if (z.size() != net.truncation)
    throw std::invalid_argument("forward_scalar: input dimension mismatch");
  double out = 0.0;
  for (const auto& nr : net.neurons) {
    Vec w = matvec(nr.B, z.coords);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += nr.y[k];
    Vec s = activate(net.activation, w);
    out += dot(nr.h, s);
  }
  return out;
}

ScalarNet project_params(const ScalarNet& net, std::size_t n_prime) {
  if (n_prime < 1 || n_prime > net.truncation)
    throw std::out_of_range("project_params: N' out of range");
  ScalarNet out;
  out.truncation = n_prime;
  out.encoder = net.encoder;
  out.activation = truncate_activation(net.activation, n_prime);
  out.neurons.reserve(net.neurons.size());
  for (const auto& nr : net.neurons) {
    NeuronParams p;
    p.h.assign(nr.h.begin(), nr.h.begin() + static_cast<std::ptrdiff_t>(n_prime));
    p.y.assign(nr.y.begin(), nr.y.begin() + static_cast<std::ptrdiff_t>(n_prime));
    p.B = Mat(n_prime);
    for (std::size_t i = 0; i < n_prime; ++i)
      for (std::size_t j = 0; j < n_prime; ++j) p.B.at(i, j) = nr.B.at(i, j);
    out.neurons.push_back(std::move(p));
  }
  return out;
}

Vec forward_vector(const VectorNet& vnet, const CubePoint& z) {
  if (vnet.components.empty() || vnet.components.size() != vnet.out_vectors.size())
    throw std::invalid_argument("forward_vector: malformed vector net");
  Vec out(vnet.out_dim(), 0.0);
  for (std::size_t m = 0; m < vnet.components.size(); ++m) {
    double s = forward_scalar(vnet.components[m], z);
    const Vec& v = vnet.out_vectors[m];
    if (v.size() != out.size())
      throw std::invalid_argument("forward_vector: out_vectors length mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += s * v[k];
  }
  return out;
}

Vec truncate_target(const Vec& v, std::size_t k_prime) {
  if (k_prime < 1 || k_prime > v.size())
    throw std::out_of_range("truncate_target: K' out of range");
  return Vec(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k_prime));
}

ScalarNet init_scalar_net(std::size_t truncation, std::size_t neuron_count,
                          ActivationSpec activation,
                          std::shared_ptr<const EncoderSpec> encoder, std::mt19937_64& g) {
  if (truncation < 1 || neuron_count < 1)
    throw std::invalid_argument("init_scalar_net: need truncation >= 1 and neurons >= 1");
  ScalarNet net;
  net.truncation = truncation;
  net.activation = std::move(activation);
  net.encoder = std::move(encoder);
  double hb = 1.0 / std::sqrt(static_cast<double>(neuron_count * truncation));
  double bs = 1.0 / std::sqrt(static_cast<double>(truncation));
  net.neurons.resize(neuron_count);
  for (auto& nr : net.neurons) {
    nr.h.resize(truncation);
    nr.y.resize(truncation);
    nr.B = Mat(truncation);
    for (auto& v : nr.h) v = uniform(g, -hb, hb);
    for (auto& v : nr.B.a) v = bs * normal(g);
    for (auto& v : nr.y) v = uniform(g, -0.5, 0.5);
  }
  net.validate();
  return net;
}

VectorNet init_vector_net(std::size_t truncation, std::size_t neuron_count,
                          std::size_t component_count, std::size_t out_dim,
                          const ActivationSpec& activation,
                          std::shared_ptr<const EncoderSpec> encoder, std::mt19937_64& g) {
  if (component_count < 1 || out_dim < 1)
    throw std::invalid_argument("init_vector_net: need components >= 1 and out_dim >= 1");
  VectorNet vnet;
  vnet.components.reserve(component_count);
  vnet.out_vectors.reserve(component_count);
  double vb = 1.0 / std::sqrt(static_cast<double>(component_count));
  for (std::size_t m = 0; m < component_count; ++m)
    vnet.components.push_back(init_scalar_net(truncation, neuron_count, activation, encoder, g));
  for (std::size_t m = 0; m < component_count; ++m) {
    Vec v(out_dim);
    for (auto& x : v) x = uniform(g, -vb, vb);
    vnet.out_vectors.push_back(std::move(v));
  }
  vnet.validate();
  return vnet;
}

}  // namespace qpnet
