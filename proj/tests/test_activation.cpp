#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpnet/activation.hpp"
#include "qpnet/rng.hpp"

using namespace qpnet;

namespace {
ActivationSpec e1_act(GateKind gate) {
  return RankOneActivation{{1.0, 0.0}, {1.0, 0.0}, gate};
}
}  // namespace

TEST_CASE("rank-one apply examples") {
  ActivationSpec act = e1_act(GateKind::ReluTanh);
  Vec zero = activate(act, {0.0, 0.0});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  Vec v = activate(act, {0.5, 0.25});
  CHECK(v[0] == doctest::Approx(0.46211715726000974).epsilon(1e-14));
  CHECK(v[0] == std::tanh(0.5));
  CHECK(v[1] == 0.0);

  Vec neg = activate(act, {-3.0, 7.0});
  CHECK(neg[0] == 0.0);
  CHECK(neg[1] == 0.0);
}

TEST_CASE("apply rejects dimension mismatch") {
  CHECK_THROWS_AS(activate(e1_act(GateKind::ReluTanh), {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("componentwise apply gates each coordinate") {
  ActivationSpec act = ComponentwiseActivation{GateKind::ReluTanh};
  Vec v = activate(act, {0.5, -2.0, 0.0});
  CHECK(v[0] == std::tanh(0.5));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 0.0);
}

TEST_CASE("lipschitz_bound values") {
  CHECK(lipschitz_bound(e1_act(GateKind::ReluTanh)) == doctest::Approx(1.0));
  ActivationSpec scaled = RankOneActivation{{2.0, 0.0}, {0.0, 3.0}, GateKind::ReluTanh};
  CHECK(lipschitz_bound(scaled) == doctest::Approx(6.0));
  CHECK(lipschitz_bound(ActivationSpec{ComponentwiseActivation{GateKind::ReluTanh}}) ==
        doctest::Approx(1.0));
  CHECK(lipschitz_bound(ActivationSpec{ComponentwiseActivation{GateKind::GatedTanh}}) ==
        doctest::Approx(1.25));
}

TEST_CASE("gate limit sandwich") {
  for (GateKind gate : {GateKind::ReluTanh, GateKind::GatedTanh}) {
    CHECK(gate_value(gate, 0.0) == 0.0);
    for (double xi = 20.0; xi <= 60.0; xi += 5.0) {
      CHECK(1.0 - gate_value(gate, xi) < 1e-8);
      CHECK(std::abs(gate_value(gate, -xi)) < 1e-8);
    }
  }
}

TEST_CASE("separating limits along the axes") {
  ActivationSpec act = e1_act(GateKind::ReluTanh);
  const auto& r = std::get<RankOneActivation>(act);

  // Positive side: 1 - tanh(100) < 1e-6.
  Vec pos = activate(act, vscale(100.0, {1.0, 0.0}));
  CHECK(norm2(vsub(pos, r.u_plus)) < 1e-6);

  // Negative side clamps to zero exactly.
  Vec neg = activate(act, vscale(100.0, {-1.0, 0.0}));
  CHECK(norm2(neg) == 0.0);

  // Kernel direction e2 is annihilated for every lambda.
  for (double lam : {1.0, 10.0, 1e4}) {
    Vec ker = activate(act, vscale(lam, {0.0, 1.0}));
    CHECK(norm2(ker) == 0.0);
  }
}

TEST_CASE("check_separating passes for random rank-one activations") {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 5; ++rep) {
    std::size_t n = 2 + g() % 8;
    RankOneActivation act;
    act.psi.resize(n);
    act.u_plus.resize(n);
    for (auto& v : act.psi) v = normal(g);
    for (auto& v : act.u_plus) v = normal(g);
    act.gate = rep % 2 == 0 ? GateKind::ReluTanh : GateKind::GatedTanh;
    // GatedTanh's tail is e^{-xi}; push lambda so the slowest admitted
    // direction still lands under the tolerance.
    double lam = act.gate == GateKind::GatedTanh ? 300.0 : 100.0;
    SeparationReport r = check_separating(ActivationSpec{act}, lam, 200, 1e-6, g());
    INFO(r.detail);
    CHECK(r.pass);
    CHECK(r.positive_trials > 0);
    CHECK(r.negative_trials > 0);
    CHECK(r.kernel_trials > 0);
    if (act.gate == GateKind::ReluTanh) {
      CHECK(r.worst_negative == 0.0);
      CHECK(r.worst_kernel == 0.0);
    }
  }
}

TEST_CASE("check_separating requires rank-one") {
  CHECK_THROWS(check_separating(ActivationSpec{ComponentwiseActivation{}}, 10.0, 5, 1e-6, 1));
}

TEST_CASE("boundedness: |sigma(w)| <= |u_plus|") {
  std::mt19937_64 g(11);
  RankOneActivation act;
  act.psi = {0.3, -1.2, 0.5};
  act.u_plus = {1.0, 2.0, -0.5};
  act.gate = GateKind::GatedTanh;
  double cap = norm2(act.u_plus);
  for (int i = 0; i < 1000; ++i) {
    Vec w(3);
    for (auto& v : w) v = uniform(g, -50.0, 50.0);
    CHECK(norm2(activate(ActivationSpec{act}, w)) <= cap * (1.0 + 1e-12));
  }
}

TEST_CASE("empirical Lipschitz bound holds on random pairs") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 10000; ++i) {
    std::size_t n = 1 + g() % 6;
    RankOneActivation act;
    act.psi.resize(n);
    act.u_plus.resize(n);
    for (auto& v : act.psi) v = normal(g);
    for (auto& v : act.u_plus) v = normal(g);
    if (norm2(act.psi) == 0.0) act.psi[0] = 1.0;
    if (norm2(act.u_plus) == 0.0) act.u_plus[0] = 1.0;
    act.gate = i % 2 == 0 ? GateKind::ReluTanh : GateKind::GatedTanh;
    ActivationSpec spec = act;
    Vec w(n), wp(n);
    for (auto& v : w) v = uniform(g, -4.0, 4.0);
    for (std::size_t k = 0; k < n; ++k) wp[k] = w[k] + uniform(g, -2.0, 2.0);
    double lhs = norm2(vsub(activate(spec, w), activate(spec, wp)));
    double rhs = lipschitz_bound(spec) * norm2(vsub(w, wp));
    CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("validate_activation rejects zero psi or u_plus") {
  CHECK_THROWS(validate_activation(RankOneActivation{{0.0, 0.0}, {1.0, 0.0}, GateKind::ReluTanh}));
  CHECK_THROWS(validate_activation(RankOneActivation{{1.0}, {0.0}, GateKind::ReluTanh}));
  CHECK_THROWS(validate_activation(RankOneActivation{{1.0, 2.0}, {1.0}, GateKind::ReluTanh}));
}

TEST_CASE("default rank-one direction is the normalized ones vector") {
  RankOneActivation act = default_rank_one(4, GateKind::GatedTanh);
  CHECK(norm2(act.psi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(act.psi[0] == doctest::Approx(0.5).epsilon(1e-12));
}
