#include "qpnet/activation.hpp"

#include <cmath>
#include <stdexcept>

#include "qpnet/rng.hpp"

namespace qpnet {

double gate_value(GateKind kind, double xi) {
  switch (kind) {
    case GateKind::ReluTanh:
      return xi > 0.0 ? std::tanh(xi) : 0.0;
    case GateKind::GatedTanh:
      return std::tanh(xi) / (1.0 + std::exp(-xi));
  }
  throw std::logic_error("gate_value: bad kind");
}

double gate_derivative(GateKind kind, double xi) {
  switch (kind) {
    case GateKind::ReluTanh: {
      if (xi <= 0.0) return 0.0;
      double t = std::tanh(xi);
      return 1.0 - t * t;
    }
    case GateKind::GatedTanh: {
      double t = std::tanh(xi);
      double s = 1.0 / (1.0 + std::exp(-xi));
      return (1.0 - t * t) * s + t * s * (1.0 - s);
    }
  }
  throw std::logic_error("gate_derivative: bad kind");
}

double gate_lipschitz(GateKind kind) {
  switch (kind) {
    case GateKind::ReluTanh:
      return 1.0;
    case GateKind::GatedTanh:
      return 1.25;
  }
  throw std::logic_error("gate_lipschitz: bad kind");
}

std::size_t activation_dim(const ActivationSpec& act) {
  if (const auto* r = std::get_if<RankOneActivation>(&act)) return r->psi.size();
  return 0;
}

GateKind activation_gate(const ActivationSpec& act) {
  return std::visit([](const auto& a) { return a.gate; }, act);
}

void validate_activation(const ActivationSpec& act) {
  if (const auto* r = std::get_if<RankOneActivation>(&act)) {
    if (r->psi.size() != r->u_plus.size())
      throw std::invalid_argument("activation: psi/u_plus length mismatch");
    if (norm2(r->psi) == 0.0 || norm2(r->u_plus) == 0.0)
      throw std::invalid_argument("activation: psi and u_plus must be nonzero");
  }
}

Vec activate(const ActivationSpec& act, const Vec& w) {
  if (const auto* r = std::get_if<RankOneActivation>(&act)) {
    if (w.size() != r->psi.size())
      throw std::invalid_argument("apply: dimension mismatch");
    double b = gate_value(r->gate, dot(r->psi, w));
    return vscale(b, r->u_plus);
  }
  const auto& c = std::get<ComponentwiseActivation>(act);
  Vec out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = gate_value(c.gate, w[k]);
  return out;
}

double lipschitz_bound(const ActivationSpec& act) {
  if (const auto* r = std::get_if<RankOneActivation>(&act))
    return norm2(r->psi) * norm2(r->u_plus) * gate_lipschitz(r->gate);
  return gate_lipschitz(std::get<ComponentwiseActivation>(act).gate);
}

double rank_one_preactivation(const RankOneActivation& act, const Vec& w) {
  return dot(act.psi, w);
}

SeparationReport check_separating(const ActivationSpec& act, double lambda, int trials,
                                  double tol, std::uint64_t seed) {
  const auto* r = std::get_if<RankOneActivation>(&act);
  if (r == nullptr)
    throw std::invalid_argument("check_separating: requires a rank-one activation");
  validate_activation(act);

  const std::size_t n = r->psi.size();
  std::mt19937_64 g(seed);
  SeparationReport rep;

  auto fail = [&](const Vec& x, const std::string& why) {
    if (rep.pass) {
      rep.pass = false;
      rep.first_violation = x;
      rep.detail = why;
    }
  };

  for (int t = 0; t < trials; ++t) {
    Vec x(n);
    double s = 0.0;
    do {
      for (auto& v : x) v = normal(g);
      double nx = norm2(x);
      if (nx == 0.0) continue;
      for (auto& v : x) v /= nx;
      s = dot(r->psi, x);
    } while (std::abs(s) <= 0.1);

    Vec sig = activate(act, vscale(lambda, x));
    if (s > 0.1) {
      ++rep.positive_trials;
      double err = norm2(vsub(sig, r->u_plus));
      rep.worst_positive = std::max(rep.worst_positive, err);
      if (!(err < tol)) fail(x, "positive direction did not reach u_plus");
    } else {
      ++rep.negative_trials;
      double err = norm2(sig);
      rep.worst_negative = std::max(rep.worst_negative, err);
      bool ok = r->gate == GateKind::ReluTanh ? err == 0.0 : err < tol;
      if (!ok) fail(x, "negative direction did not vanish");
    }
  }

  // Kernel directions 2^k (psi_j e_i - psi_i e_j). With power-of-two scale
  // factors (including lambda rounded up to a power of two) every product in
  // psi . (lambda x) is a power-of-two multiple of fl(psi_i psi_j), so the two
  // nonzero terms cancel exactly in floating point for arbitrary psi.
  int lam_exp;
  double mant = std::frexp(lambda, &lam_exp);
  double lambda_ker = (mant == 0.5) ? lambda : std::ldexp(1.0, lam_exp);
  if (n >= 2) {
    for (int t = 0; t < trials; ++t) {
      std::size_t i = static_cast<std::size_t>(g() % n);
      std::size_t j = static_cast<std::size_t>(g() % n);
      if (i == j || r->psi[i] == 0.0 || r->psi[j] == 0.0) continue;
      double scale = std::ldexp(1.0, static_cast<int>(g() % 7) - 3);
      Vec x(n, 0.0);
      x[i] = scale * r->psi[j];
      x[j] = -scale * r->psi[i];
      ++rep.kernel_trials;
      Vec sig = activate(act, vscale(lambda_ker, x));
      double err = norm2(sig);
      rep.worst_kernel = std::max(rep.worst_kernel, err);
      bool ok = r->gate == GateKind::ReluTanh ? err == 0.0 : err < tol;
      if (!ok) fail(x, "kernel direction did not vanish");
    }
  } else {
    Vec zero(n, 0.0);
    ++rep.kernel_trials;
    if (norm2(activate(act, zero)) != 0.0) fail(zero, "sigma(0) must be 0");
  }
  return rep;
}

RankOneActivation default_rank_one(std::size_t n, GateKind gate) {
  if (n < 1) throw std::invalid_argument("default_rank_one: n must be >= 1");
  double v = 1.0 / std::sqrt(static_cast<double>(n));
  return RankOneActivation{Vec(n, v), Vec(n, v), gate};
}

namespace {
Vec resize_copy(const Vec& v, std::size_t m) {
  Vec out(m, 0.0);
  std::size_t k = std::min(m, v.size());
  for (std::size_t i = 0; i < k; ++i) out[i] = v[i];
  return out;
}
}  // namespace

ActivationSpec truncate_activation(const ActivationSpec& act, std::size_t n) {
  if (const auto* r = std::get_if<RankOneActivation>(&act)) {
    if (n > r->psi.size())
      throw std::out_of_range("truncate_activation: n exceeds activation dimension");
    return RankOneActivation{resize_copy(r->psi, n), resize_copy(r->u_plus, n), r->gate};
  }
  return act;
}

ActivationSpec pad_activation(const ActivationSpec& act, std::size_t m) {
  if (const auto* r = std::get_if<RankOneActivation>(&act)) {
    if (m < r->psi.size())
      throw std::invalid_argument("pad_activation: m below activation dimension");
    return RankOneActivation{resize_copy(r->psi, m), resize_copy(r->u_plus, m), r->gate};
  }
  return act;
}

}  // namespace qpnet
