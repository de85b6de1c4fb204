#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpnet/net.hpp"
#include "qpnet/rng.hpp"

using namespace qpnet;

namespace {

// J=1, psi = u_plus = e1, h = e1, B = I, y = 0 at N=2.
ScalarNet reference_net(GateKind gate = GateKind::ReluTanh) {
  ScalarNet net;
  net.truncation = 2;
  net.activation = RankOneActivation{{1.0, 0.0}, {1.0, 0.0}, gate};
  NeuronParams nr;
  nr.h = {1.0, 0.0};
  nr.y = {0.0, 0.0};
  nr.B = Mat::identity(2);
  net.neurons.push_back(nr);
  return net;
}

}  // namespace

TEST_CASE("forward_scalar examples") {
  ScalarNet net = reference_net();
  CubePoint z{{0.5, 0.25}};
  CHECK(forward_scalar(net, z) == std::tanh(0.5));
  CHECK(forward_scalar(net, z) == doctest::Approx(0.46211715726000974).epsilon(1e-14));

  // All-zero parameters give the zero function.
  ScalarNet zero = net;
  zero.neurons[0].h = {0.0, 0.0};
  zero.neurons[0].B = Mat(2);
  CHECK(forward_scalar(zero, z) == 0.0);

  // Linear readout: doubling h doubles the output.
  ScalarNet twice = net;
  twice.neurons[0].h = {2.0, 0.0};
  CHECK(forward_scalar(twice, z) == doctest::Approx(2.0 * std::tanh(0.5)).epsilon(1e-14));
}

TEST_CASE("forward_scalar rejects wrong input length") {
  CHECK_THROWS(forward_scalar(reference_net(), CubePoint{{0.5}}));
}

TEST_CASE("project_params at full truncation is output-identical") {
  std::mt19937_64 g(3);
  ScalarNet net = init_scalar_net(6, 4, RankOneActivation{{1, 0, 0, 0, 0, 0},
                                                          {0, 1, 0, 0, 0, 0},
                                                          GateKind::GatedTanh},
                                  nullptr, g);
  ScalarNet same = project_params(net, 6);
  for (int i = 0; i < 20; ++i) {
    CubePoint z;
    z.coords.resize(6);
    for (std::size_t k = 1; k <= 6; ++k) z.coords[k - 1] = uniform01(g) / double(k);
    CHECK(forward_scalar(net, z) == forward_scalar(same, z));
  }
}

TEST_CASE("projection kills off-diagonal coupling, keeps decoupled output") {
  // B = I: the second coordinate never enters psi . (Bz), so N'=1 is exact.
  ScalarNet net = reference_net();
  ScalarNet p1 = project_params(net, 1);
  CHECK(forward_scalar(p1, CubePoint{{0.5}}) == std::tanh(0.5));

  // B = [[0,1],[0,0]] routes z2 into the gate; truncation removes it.
  ScalarNet coupled = reference_net();
  coupled.neurons[0].B = Mat(2);
  coupled.neurons[0].B.at(0, 1) = 1.0;
  CHECK(forward_scalar(coupled, CubePoint{{0.5, 0.25}}) == std::tanh(0.25));
  ScalarNet cp = project_params(coupled, 1);
  CHECK(forward_scalar(cp, CubePoint{{0.5}}) == 0.0);
}

TEST_CASE("project_params range errors") {
  ScalarNet net = reference_net();
  CHECK_THROWS_AS(project_params(net, 0), std::out_of_range);
  CHECK_THROWS_AS(project_params(net, 3), std::out_of_range);
}

TEST_CASE("forward_vector examples") {
  // M=1 with scalar output 0.5 and v = (2,0,0).
  ScalarNet half = reference_net();
  half.neurons[0].h = {0.5 / std::tanh(0.5), 0.0};
  VectorNet vnet;
  vnet.components.push_back(half);
  vnet.out_vectors.push_back({2.0, 0.0, 0.0});
  Vec out = forward_vector(vnet, CubePoint{{0.5, 0.25}});
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);

  // Cancellation: v2 = -v1 with identical components.
  VectorNet cancel;
  cancel.components = {half, half};
  cancel.out_vectors = {{1.0, 2.0}, {-1.0, -2.0}};
  Vec zero = forward_vector(cancel, CubePoint{{0.5, 0.25}});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // All-zero parameterization.
  VectorNet vz;
  ScalarNet zn = reference_net();
  zn.neurons[0].h = {0.0, 0.0};
  vz.components = {zn};
  vz.out_vectors = {{1.0, 1.0}};
  Vec z0 = forward_vector(vz, CubePoint{{0.5, 0.25}});
  CHECK(z0[0] == 0.0);
  CHECK(z0[1] == 0.0);
}

TEST_CASE("truncate_target keeps leading coefficients") {
  CHECK(truncate_target({2.0, 3.0, 4.0}, 1) == Vec{2.0});
  CHECK(truncate_target({2.0, 3.0, 4.0}, 3) == Vec{2.0, 3.0, 4.0});
  CHECK(truncate_target({0.0, 0.0, 5.0}, 2) == Vec{0.0, 0.0});
  CHECK_THROWS_AS(truncate_target({1.0}, 2), std::out_of_range);
  CHECK_THROWS_AS(truncate_target({1.0}, 0), std::out_of_range);
}

TEST_CASE("boundedness of the forward pass") {
  std::mt19937_64 g(17);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + g() % 8;
    RankOneActivation act;
    act.psi.resize(n);
    act.u_plus.resize(n);
    for (auto& v : act.psi) v = normal(g);
    for (auto& v : act.u_plus) v = normal(g);
    if (norm2(act.psi) == 0.0) act.psi[0] = 1.0;
    if (norm2(act.u_plus) == 0.0) act.u_plus[0] = 1.0;
    act.gate = GateKind::GatedTanh;
    ScalarNet net = init_scalar_net(n, 1 + g() % 4, act, nullptr, g);
    double cap = 0.0;
    for (const auto& nr : net.neurons) cap += norm2(nr.h) * norm2(act.u_plus);
    CubePoint z;
    z.coords.resize(n);
    for (std::size_t k = 1; k <= n; ++k) z.coords[k - 1] = uniform01(g) / double(k);
    CHECK(std::abs(forward_scalar(net, z)) <= cap * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("net validation rejects inconsistent shapes") {
  ScalarNet net = reference_net();
  net.neurons[0].h = {1.0};
  CHECK_THROWS(net.validate());

  VectorNet vnet;
  vnet.components = {reference_net()};
  vnet.out_vectors = {{1.0}, {2.0}};
  CHECK_THROWS(vnet.validate());
}
