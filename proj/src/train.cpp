#include "qpnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpnet/rng.hpp"

namespace qpnet {

void TrainConfig::validate() const {
  double lr = std::visit([](const auto& o) { return o.lr; }, optimizer);
  if (lr < 0.0) throw std::invalid_argument("TrainConfig: negative learning rate");
  if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

double loss_mse(const ScalarNet& net, const std::vector<ScalarSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss_mse: empty batch");
  double s = 0.0;
  for (const auto& sample : batch) {
    double e = forward_scalar(net, sample.z) - sample.target;
    s += e * e;
  }
  return s / static_cast<double>(batch.size());
}

double loss_mse(const VectorNet& vnet, const std::vector<VectorSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss_mse: empty batch");
  double s = 0.0;
  for (const auto& sample : batch) {
    Vec pred = forward_vector(vnet, sample.z);
    if (pred.size() != sample.target.size())
      throw std::invalid_argument("loss_mse: target length mismatch");
    for (std::size_t k = 0; k < pred.size(); ++k) {
      double e = pred[k] - sample.target[k];
      s += e * e;
    }
  }
  return s / static_cast<double>(batch.size());
}

namespace {

std::vector<NeuronParams> zero_like(const ScalarNet& net) {
  std::vector<NeuronParams> g(net.neurons.size());
  for (auto& nr : g) {
    nr.h.assign(net.truncation, 0.0);
    nr.y.assign(net.truncation, 0.0);
    nr.B = Mat(net.truncation);
  }
  return g;
}

// Adds coeff * d(out)/d(params) for one sample to the per-neuron gradients.
// Tracks the distance of rank-one ReluTanh preactivations to the kink.
void accumulate_scalar_grad(const ScalarNet& net, const CubePoint& z, double coeff,
                            std::vector<NeuronParams>& g, double& min_kink, bool& kink_flag) {
  const std::size_t n = net.truncation;
  const auto* r1 = std::get_if<RankOneActivation>(&net.activation);
  for (std::size_t j = 0; j < net.neurons.size(); ++j) {
    const auto& nr = net.neurons[j];
    Vec w = matvec(nr.B, z.coords);
    for (std::size_t k = 0; k < n; ++k) w[k] += nr.y[k];
    if (r1 != nullptr) {
      double s = dot(r1->psi, w);
      if (r1->gate == GateKind::ReluTanh) {
        min_kink = std::min(min_kink, std::abs(s));
        if (std::abs(s) < 1e-3) kink_flag = true;
      }
      double b = gate_value(r1->gate, s);
      double bd = gate_derivative(r1->gate, s);
      double c = dot(nr.h, r1->u_plus);
      for (std::size_t k = 0; k < n; ++k) {
        g[j].h[k] += coeff * b * r1->u_plus[k];
        g[j].y[k] += coeff * c * bd * r1->psi[k];
      }
      for (std::size_t i = 0; i < n; ++i) {
        double row = coeff * c * bd * r1->psi[i];
        for (std::size_t k = 0; k < n; ++k) g[j].B.a[i * n + k] += row * z.coords[k];
      }
    } else {
      const auto& cw = std::get<ComponentwiseActivation>(net.activation);
      for (std::size_t k = 0; k < n; ++k) {
        double b = gate_value(cw.gate, w[k]);
        double bd = gate_derivative(cw.gate, w[k]);
        if (cw.gate == GateKind::ReluTanh) {
          min_kink = std::min(min_kink, std::abs(w[k]));
          if (std::abs(w[k]) < 1e-3) kink_flag = true;
        }
        g[j].h[k] += coeff * b;
        double row = coeff * nr.h[k] * bd;
        g[j].y[k] += row;
        for (std::size_t l = 0; l < n; ++l) g[j].B.a[k * n + l] += row * z.coords[l];
      }
    }
  }
}

}  // namespace

GradPacket grad(const ScalarNet& net, const std::vector<ScalarSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  GradPacket packet;
  packet.components.push_back(zero_like(net));
  packet.min_kink_distance = std::numeric_limits<double>::infinity();
  double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& sample : batch) {
    double resid = forward_scalar(net, sample.z) - sample.target;
    double coeff = 2.0 * resid * inv;
    accumulate_scalar_grad(net, sample.z, coeff, packet.components[0],
                           packet.min_kink_distance, packet.kink_proximity);
  }
  if (!std::isfinite(packet.min_kink_distance)) packet.min_kink_distance = 0.0;
  return packet;
}

GradPacket grad(const VectorNet& vnet, const std::vector<VectorSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  vnet.validate();
  GradPacket packet;
  for (const auto& c : vnet.components) packet.components.push_back(zero_like(c));
  for (const auto& v : vnet.out_vectors) packet.out_vectors.emplace_back(v.size(), 0.0);
  packet.min_kink_distance = std::numeric_limits<double>::infinity();
  double inv = 1.0 / static_cast<double>(batch.size());

  for (const auto& sample : batch) {
    std::vector<double> scalars(vnet.components.size());
    for (std::size_t m = 0; m < vnet.components.size(); ++m)
      scalars[m] = forward_scalar(vnet.components[m], sample.z);
    Vec pred(vnet.out_dim(), 0.0);
    for (std::size_t m = 0; m < vnet.components.size(); ++m)
      for (std::size_t k = 0; k < pred.size(); ++k)
        pred[k] += scalars[m] * vnet.out_vectors[m][k];
    if (pred.size() != sample.target.size())
      throw std::invalid_argument("grad: target length mismatch");

    Vec coeff(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k)
      coeff[k] = 2.0 * (pred[k] - sample.target[k]) * inv;

    for (std::size_t m = 0; m < vnet.components.size(); ++m) {
      double ds = dot(coeff, vnet.out_vectors[m]);
      accumulate_scalar_grad(vnet.components[m], sample.z, ds, packet.components[m],
                             packet.min_kink_distance, packet.kink_proximity);
      for (std::size_t k = 0; k < coeff.size(); ++k)
        packet.out_vectors[m][k] += scalars[m] * coeff[k];
    }
  }
  if (!std::isfinite(packet.min_kink_distance)) packet.min_kink_distance = 0.0;
  return packet;
}

namespace {

// Flat views over parameters and gradients share one ordering:
// component-major, neuron-major, h | B | y, then out_vectors.
std::vector<double*> param_refs(ScalarNet& net) {
  std::vector<double*> p;
  for (auto& nr : net.neurons) {
    for (auto& v : nr.h) p.push_back(&v);
    for (auto& v : nr.B.a) p.push_back(&v);
    for (auto& v : nr.y) p.push_back(&v);
  }
  return p;
}

std::vector<double*> param_refs(VectorNet& vnet) {
  std::vector<double*> p;
  for (auto& c : vnet.components)
    for (auto& nr : c.neurons) {
      for (auto& v : nr.h) p.push_back(&v);
      for (auto& v : nr.B.a) p.push_back(&v);
      for (auto& v : nr.y) p.push_back(&v);
    }
  for (auto& v : vnet.out_vectors)
    for (auto& x : v) p.push_back(&x);
  return p;
}

Vec flatten(const GradPacket& g) {
  Vec out;
  for (const auto& comp : g.components)
    for (const auto& nr : comp) {
      out.insert(out.end(), nr.h.begin(), nr.h.end());
      out.insert(out.end(), nr.B.a.begin(), nr.B.a.end());
      out.insert(out.end(), nr.y.begin(), nr.y.end());
    }
  for (const auto& v : g.out_vectors) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string component_name(std::size_t flat, const GradPacket& g) {
  std::size_t pos = flat;
  for (std::size_t c = 0; c < g.components.size(); ++c)
    for (std::size_t j = 0; j < g.components[c].size(); ++j) {
      const auto& nr = g.components[c][j];
      std::size_t block = nr.h.size() + nr.B.a.size() + nr.y.size();
      if (pos < block) {
        std::string field = pos < nr.h.size()           ? "h"
                            : pos < nr.h.size() + nr.B.a.size() ? "B"
                                                          : "y";
        return "component " + std::to_string(c) + " neuron " + std::to_string(j) + " " + field;
      }
      pos -= block;
    }
  return "out_vector entry " + std::to_string(pos);
}

template <typename Model, typename Sample>
FdReport fd_check_impl(const Model& model, const std::vector<Sample>& batch, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_check: step must be positive");
  GradPacket analytic = grad(model, batch);
  FdReport rep;
  rep.min_kink_distance = analytic.min_kink_distance;
  if (analytic.kink_proximity) {
    rep.refused = true;
    rep.worst_component = "batch within 1e-3 of a ReluTanh kink";
    return rep;
  }
  Vec ga = flatten(analytic);
  Model probe = model;
  std::vector<double*> refs = param_refs(probe);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    double saved = *refs[i];
    *refs[i] = saved + step;
    double lp = loss_mse(probe, batch);
    *refs[i] = saved - step;
    double lm = loss_mse(probe, batch);
    *refs[i] = saved;
    double fd = (lp - lm) / (2.0 * step);
    double denom = std::max({1e-8, std::abs(ga[i]), std::abs(fd)});
    double rel = std::abs(ga[i] - fd) / denom;
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst_component = component_name(i, analytic);
    }
  }
  return rep;
}

struct AdamState {
  Vec m, v;
  std::size_t t = 0;
};

template <typename Model, typename Sample>
FitResult fit_impl(Model& model, const std::vector<Sample>& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("fit: empty dataset");
  model.validate();

  std::vector<double*> refs = param_refs(model);
  const std::size_t batch = std::min(cfg.batch_size, data.size());
  std::mt19937_64 g(derive_seed(cfg.seed, 0x7f17));

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();  // forces a shuffle before the first batch

  AdamState adam;
  const auto* adam_cfg = std::get_if<AdamConfig>(&cfg.optimizer);
  if (adam_cfg != nullptr) {
    adam.m.assign(refs.size(), 0.0);
    adam.v.assign(refs.size(), 0.0);
  }

  FitResult result;
  result.loss_history.reserve(cfg.steps);
  std::vector<Sample> minibatch;
  minibatch.reserve(batch);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    minibatch.clear();
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor >= order.size()) {
        for (std::size_t i = order.size(); i > 1; --i)
          std::swap(order[i - 1], order[g() % i]);
        cursor = 0;
      }
      minibatch.push_back(data[order[cursor++]]);
    }

    double loss = loss_mse(model, minibatch);
    if (!std::isfinite(loss)) {
      result.diverged = true;
      result.divergence_step = step;
      return result;
    }
    result.loss_history.push_back(loss);

    GradPacket packet = grad(model, minibatch);
    Vec gflat = flatten(packet);

    // Stage the whole update, then apply only if every entry stays finite.
    Vec next(refs.size());
    if (adam_cfg != nullptr) {
      ++adam.t;
      double b1t = 1.0 - std::pow(adam_cfg->beta1, static_cast<double>(adam.t));
      double b2t = 1.0 - std::pow(adam_cfg->beta2, static_cast<double>(adam.t));
      for (std::size_t i = 0; i < refs.size(); ++i) {
        adam.m[i] = adam_cfg->beta1 * adam.m[i] + (1.0 - adam_cfg->beta1) * gflat[i];
        adam.v[i] = adam_cfg->beta2 * adam.v[i] + (1.0 - adam_cfg->beta2) * gflat[i] * gflat[i];
        double upd = adam_cfg->lr * (adam.m[i] / b1t) / (std::sqrt(adam.v[i] / b2t) + adam_cfg->eps);
        next[i] = *refs[i] - upd;
      }
    } else {
      double lr = std::get<SgdConfig>(cfg.optimizer).lr;
      for (std::size_t i = 0; i < refs.size(); ++i) next[i] = *refs[i] - lr * gflat[i];
    }
    if (!all_finite(next)) {
      result.diverged = true;
      result.divergence_step = step;
      return result;
    }
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i] = next[i];
  }
  return result;
}

}  // namespace

FdReport fd_check(const ScalarNet& net, const std::vector<ScalarSample>& batch, double step) {
  return fd_check_impl(net, batch, step);
}

FdReport fd_check(const VectorNet& vnet, const std::vector<VectorSample>& batch, double step) {
  return fd_check_impl(vnet, batch, step);
}

FitResult fit(ScalarNet& net, const std::vector<ScalarSample>& data, const TrainConfig& cfg) {
  return fit_impl(net, data, cfg);
}

FitResult fit(VectorNet& vnet, const std::vector<VectorSample>& data, const TrainConfig& cfg) {
  return fit_impl(vnet, data, cfg);
}

}  // namespace qpnet
