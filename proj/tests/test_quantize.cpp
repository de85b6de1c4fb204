#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qpnet/quantize.hpp"
#include "qpnet/rng.hpp"

using namespace qpnet;

namespace {

Codebook book_of(std::vector<Vec> centers) {
  Codebook cb;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    cb.centers.push_back(centers[i]);
    cb.payload_refs.push_back("p" + std::to_string(i));
    cb.payloads.push_back(FunctionSample{{0.0, 1.0}, {double(i), double(i)}});
  }
  return cb;
}

// Deliberately naive: exhaustive double loop, squared distances.
std::size_t brute_force_min_index(const Codebook& cb, const Vec& w) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cb.centers.size(); ++r) {
    double d = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      double diff = w[k] - cb.centers[r][k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("metric projection: exact equidistance resolves to the lower index") {
  Codebook cb = book_of({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(metric_project(cb, {0.5, 0.3}) == 0);
  CHECK(metric_project(cb, {0.9, 0.0}) == 1);
}

TEST_CASE("metric projection rejects an empty codebook") {
  Codebook cb;
  CHECK_THROWS_AS(metric_project(cb, {1.0}), std::invalid_argument);
}

TEST_CASE("metric projection agrees with the brute-force oracle on a grid") {
  std::mt19937_64 g(23);
  Codebook cb;
  for (int i = 0; i < 17; ++i) {
    Vec c(2);
    for (auto& v : c) v = uniform(g, -1.0, 1.0);
    cb.centers.push_back(c);
    cb.payload_refs.push_back("c" + std::to_string(i));
    cb.payloads.push_back(FunctionSample{{0.0, 1.0}, {0.0, 0.0}});
  }
  for (int ix = 0; ix < 100; ++ix)
    for (int iy = 0; iy < 100; ++iy) {
      Vec w = {-1.0 + 0.02 * ix, -1.0 + 0.02 * iy};
      CHECK(metric_project(cb, w) == brute_force_min_index(cb, w));
    }
}

TEST_CASE("build_codebook greedy sweep, worked example") {
  std::vector<CodebookPoint> pts;
  for (int i = 0; i <= 10; ++i)
    pts.push_back({{static_cast<double>(i) / 10.0}, "p" + std::to_string(i),
                   FunctionSample{{0.0, 1.0}, {0.0, 0.0}}});
  Codebook cb = build_codebook(pts, 0.15);
  REQUIRE(cb.centers.size() == 6);
  Vec want = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(cb.centers[i][0] == doctest::Approx(want[i]).epsilon(1e-12));
  CHECK(cb.covering_radius == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(cb.covering_radius <= 0.15);
}

TEST_CASE("build_codebook degenerate cases") {
  std::vector<CodebookPoint> one = {{{0.3, 0.4}, "a", FunctionSample{{0.0, 1.0}, {0.0, 0.0}}}};
  Codebook single = build_codebook(one, 0.5);
  CHECK(single.centers.size() == 1);
  CHECK(single.covering_radius == 0.0);

  std::vector<CodebookPoint> spread;
  for (int i = 0; i < 7; ++i)
    spread.push_back({{double(i)}, "s" + std::to_string(i),
                      FunctionSample{{0.0, 1.0}, {0.0, 0.0}}});
  Codebook all = build_codebook(spread, 0.5);  // min pairwise distance is 1
  CHECK(all.centers.size() == 7);
  CHECK(all.covering_radius == 0.0);

  CHECK_THROWS(build_codebook({}, 0.1));
  CHECK_THROWS(build_codebook(one, 0.0));
}

TEST_CASE("voronoi preimage check on ties and generic samples") {
  Codebook cb = book_of({{0.0, 0.0}, {1.0, 0.0}});
  VoronoiReport tie = voronoi_preimage_check(cb, {{0.5, 0.3}});
  CHECK(tie.ok);

  std::mt19937_64 g(31);
  std::vector<Vec> samples;
  for (int i = 0; i < 500; ++i) samples.push_back({uniform(g, -2.0, 2.0), uniform(g, -2.0, 2.0)});
  CHECK(voronoi_preimage_check(cb, samples).ok);

  Codebook single = book_of({{0.25, 0.25}});
  CHECK(voronoi_preimage_check(single, samples).ok);
}

TEST_CASE("predict_borel returns payload, index and distance") {
  // One component whose output is constant 0 (h = 0), centers near and far.
  ScalarNet comp;
  comp.truncation = 2;
  comp.activation = RankOneActivation{{1.0, 0.0}, {1.0, 0.0}, GateKind::ReluTanh};
  NeuronParams nr;
  nr.h = {0.0, 0.0};
  nr.y = {0.0, 0.0};
  nr.B = Mat(2);
  comp.neurons.push_back(nr);
  comp.encoder = std::make_shared<const EncoderSpec>(dyadic_point_eval(2));

  VectorNet vnet;
  vnet.components = {comp};
  vnet.out_vectors = {{1.0, 1.0}};  // output is identically (0, 0)

  BorelNet bnet;
  bnet.vnet = vnet;
  bnet.codebook = book_of({{0.0, 0.0}, {3.0, 4.0}});
  bnet.target_encoder = std::make_shared<const EncoderSpec>(dyadic_point_eval(2));
  bnet.validate();

  FunctionSample x;
  x.grid = {0.0, 1.0};
  x.values = {0.0, 0.0};
  BorelPrediction pred = predict_borel(bnet, x);
  CHECK(pred.index == 0);  // output hits center 0 exactly
  CHECK(pred.distance == 0.0);
  CHECK(pred.payload.values[0] == 0.0);

  // Equidistant case: move both centers at distance 5 from the origin.
  bnet.codebook = book_of({{3.0, 4.0}, {-3.0, -4.0}});
  BorelPrediction tie = predict_borel(bnet, x);
  CHECK(tie.index == 0);
  CHECK(tie.distance == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(tie.payload.values[0] == 0.0);

  // Hand-set three-center instance: nearest is (0, 0.1).
  bnet.codebook = book_of({{2.0, 2.0}, {0.0, 0.1}, {-1.0, 0.0}});
  BorelPrediction near = predict_borel(bnet, x);
  CHECK(near.index == 1);
  CHECK(near.distance == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("error decomposition bound on build points") {
  std::mt19937_64 g(37);
  std::vector<CodebookPoint> pts;
  for (int i = 0; i < 60; ++i) {
    Vec t = {uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0)};
    pts.push_back({t, "p" + std::to_string(i), FunctionSample{{0.0, 1.0}, {0.0, 0.0}}});
  }
  Codebook cb = build_codebook(pts, 0.4);
  CHECK(cb.covering_radius <= 0.4);
  for (const auto& p : pts) {
    Vec w = p.encoded;
    for (auto& v : w) v += 0.2 * normal(g);
    std::size_t r = metric_project(cb, w);
    double lhs = std::sqrt(sq_dist(p.encoded, cb.centers[r]));
    double net_err = std::sqrt(sq_dist(p.encoded, w));
    CHECK(lhs <= 2.0 * net_err + cb.covering_radius + 1e-12);
  }
}

TEST_CASE("idempotence on centers") {
  std::mt19937_64 g(41);
  Codebook cb;
  for (int i = 0; i < 12; ++i) {
    Vec c = {uniform(g, -5.0, 5.0), uniform(g, -5.0, 5.0)};
    cb.centers.push_back(c);
    cb.payload_refs.push_back("c");
    cb.payloads.push_back(FunctionSample{{0.0, 1.0}, {0.0, 0.0}});
  }
  for (std::size_t r = 0; r < cb.centers.size(); ++r)
    CHECK(metric_project(cb, cb.centers[r]) == r);
}
