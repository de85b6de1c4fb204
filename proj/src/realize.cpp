#include "qpnet/realize.hpp"

#include <cmath>
#include <stdexcept>

namespace qpnet {

void ParamPoint::validate() const {
  if (truncation < 1 || neuron_count < 1)
    throw std::invalid_argument("ParamPoint: need N >= 1 and J >= 1");
  if (theta.size() != expected_length(truncation, neuron_count))
    throw std::invalid_argument("ParamPoint: theta length mismatch");
}

Vec ext1(const Vec& h, std::size_t m) {
  if (m < h.size()) throw std::invalid_argument("ext1: M < N");
  Vec out(m, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i];
  return out;
}

Mat ext2(const Mat& beta, std::size_t m) {
  if (m < beta.n) throw std::invalid_argument("ext2: M < N");
  Mat out(m);
  for (std::size_t i = 0; i < beta.n; ++i)
    for (std::size_t j = 0; j < beta.n; ++j) out.at(i, j) = beta.at(i, j);
  return out;
}

Vec ext3(const Vec& y, std::size_t m) { return ext1(y, m); }

ParamPoint pack_params(const ScalarNet& net) {
  ParamPoint p;
  p.truncation = net.truncation;
  p.neuron_count = net.neurons.size();
  p.theta.reserve(ParamPoint::expected_length(p.truncation, p.neuron_count));
  for (const auto& nr : net.neurons) {
    p.theta.insert(p.theta.end(), nr.h.begin(), nr.h.end());
    p.theta.insert(p.theta.end(), nr.B.a.begin(), nr.B.a.end());
    p.theta.insert(p.theta.end(), nr.y.begin(), nr.y.end());
  }
  return p;
}

std::vector<NeuronParams> unpack_params(const ParamPoint& p) {
  p.validate();
  const std::size_t n = p.truncation;
  std::vector<NeuronParams> neurons(p.neuron_count);
  std::size_t pos = 0;
  for (auto& nr : neurons) {
    nr.h.assign(p.theta.begin() + pos, p.theta.begin() + pos + n);
    pos += n;
    nr.B = Mat(n);
    nr.B.a.assign(p.theta.begin() + pos, p.theta.begin() + pos + n * n);
    pos += n * n;
    nr.y.assign(p.theta.begin() + pos, p.theta.begin() + pos + n);
    pos += n;
  }
  return neurons;
}

ScalarNet pad_net(const ScalarNet& net, std::size_t m) {
  if (m < net.truncation) throw std::invalid_argument("pad_net: M < N");
  ScalarNet out;
  out.truncation = m;
  out.encoder = net.encoder;
  out.activation = pad_activation(net.activation, m);
  out.neurons.reserve(net.neurons.size());
  for (const auto& nr : net.neurons)
    out.neurons.push_back({ext1(nr.h, m), ext2(nr.B, m), ext3(nr.y, m)});
  return out;
}

double RealizedMap::operator()(const FunctionSample& x) const {
  if (!net.encoder) throw std::invalid_argument("RealizedMap: no encoder attached");
  return forward_scalar(net, encode(*net.encoder, x, net.truncation));
}

RealizedMap realize(const ParamPoint& theta, ActivationSpec act,
                    std::shared_ptr<const EncoderSpec> enc) {
  RealizedMap map;
  map.net.truncation = theta.truncation;
  map.net.neurons = unpack_params(theta);
  map.net.activation = std::move(act);
  map.net.encoder = std::move(enc);
  map.net.validate();
  return map;
}

std::vector<StabilityPair> stability_check(const NeuronParams& p, const NeuronParams& p_bar,
                                           const std::vector<CubePoint>& inputs,
                                           const ActivationSpec& act) {
  const std::size_t n = p.h.size();
  if (p_bar.h.size() != n || p.y.size() != n || p_bar.y.size() != n || p.B.n != n ||
      p_bar.B.n != n)
    throw std::invalid_argument("stability_check: dimension mismatch");
  if (activation_dim(act) != 0 && activation_dim(act) != n)
    throw std::invalid_argument("stability_check: activation dimension mismatch");

  auto single = [&](const NeuronParams& q, const CubePoint& z) {
    Vec w = matvec(q.B, z.coords);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += q.y[k];
    return activate(act, w);
  };

  double max_sigma = 0.0;
  for (const auto& z : inputs) max_sigma = std::max(max_sigma, norm2(single(p, z)));

  double dh = norm2(vsub(p.h, p_bar.h));
  double dy = norm2(vsub(p.y, p_bar.y));
  Mat db(n);
  for (std::size_t i = 0; i < n * n; ++i) db.a[i] = p.B.a[i] - p_bar.B.a[i];
  double dbf = frobenius(db);
  double lip = lipschitz_bound(act);
  double hbar = norm2(p_bar.h);

  std::vector<StabilityPair> out;
  out.reserve(inputs.size());
  for (const auto& z : inputs) {
    double lhs = std::abs(dot(p.h, single(p, z)) - dot(p_bar.h, single(p_bar, z)));
    double rhs = dh * max_sigma + lip * hbar * (dbf * norm2(z.coords) + dy);
    out.push_back({lhs, rhs});
  }
  return out;
}

}  // namespace qpnet
