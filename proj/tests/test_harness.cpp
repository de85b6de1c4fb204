#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qpnet/dataset.hpp"
#include "qpnet/serialize.hpp"
#include "qpnet/verify.hpp"

using namespace qpnet;

TEST_CASE("fourier family determinism and bounds") {
  FamilySpec spec;
  spec.modes = 3;
  spec.bound = 1.0;
  spec.grid = 101;
  spec.count = 32;
  spec.seed = 42;
  Dataset a = gen_fourier_family(spec);
  Dataset b = gen_fourier_family(spec);
  REQUIRE(a.records.size() == 32);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].x.values == b.records[i].x.values);
  }
  std::set<std::string> ids;
  for (const auto& r : a.records) ids.insert(r.id);
  CHECK(ids.size() == a.records.size());
}

TEST_CASE("m=0 gives constant functions within the bound") {
  FamilySpec spec;
  spec.modes = 0;
  spec.bound = 0.7;
  spec.grid = 11;
  spec.count = 50;
  spec.seed = 7;
  Dataset ds = gen_fourier_family(spec);
  for (const auto& r : ds.records) {
    for (double v : r.x.values) {
      CHECK(v == r.x.values[0]);
      CHECK(std::abs(v) <= 0.7);
    }
  }
}

TEST_CASE("coefficient bound: |a_k| <= c/k^2 over 1e4 draws") {
  // Recover the coefficients by trapezoid quadrature against the Fourier
  // basis: with 40 uniform intervals on a period and modes <= 4, the rule is
  // exact for the trigonometric polynomials involved.
  FamilySpec spec;
  spec.modes = 4;
  spec.bound = 1.0;
  spec.grid = 41;
  spec.count = 10000;
  spec.seed = 3;
  Dataset ds = gen_fourier_family(spec);
  for (const auto& r : ds.records) {
    FunctionSample weighted = r.x;
    double a0 = trapezoid(r.x);
    CHECK(std::abs(a0) <= 1.0 + 1e-9);
    for (std::size_t k = 1; k <= 4; ++k) {
      for (std::size_t j = 0; j < r.x.grid.size(); ++j)
        weighted.values[j] = r.x.values[j] * std::cos(2.0 * M_PI * double(k) * r.x.grid[j]);
      double ak = 2.0 * trapezoid(weighted);
      for (std::size_t j = 0; j < r.x.grid.size(); ++j)
        weighted.values[j] = r.x.values[j] * std::sin(2.0 * M_PI * double(k) * r.x.grid[j]);
      double bk = 2.0 * trapezoid(weighted);
      double cap = 1.0 / double(k * k) + 1e-9;
      CHECK(std::abs(ak) <= cap);
      CHECK(std::abs(bk) <= cap);
    }
  }
}

TEST_CASE("attach_target examples") {
  Dataset ds;
  Record r;
  r.id = "const1";
  r.x.grid = {0.0, 0.5, 1.0};
  r.x.values = {1.0, 1.0, 1.0};
  ds.records.push_back(r);

  attach_target(ds, {TargetKind::Integral, 0.0});
  CHECK(*ds.records[0].scalar_target == doctest::Approx(1.0).epsilon(1e-12));

  attach_target(ds, {TargetKind::SquareOperator, 0.0});
  REQUIRE(ds.records[0].function_target.has_value());
  for (double v : ds.records[0].function_target->values) CHECK(v == 1.0);

  // sin(2 pi t) integrates to ~0 on a fine trapezoid grid.
  Dataset sine;
  Record s;
  s.id = "sine";
  s.x.grid.resize(1001);
  s.x.values.resize(1001);
  for (int i = 0; i <= 1000; ++i) {
    double t = i / 1000.0;
    s.x.grid[i] = t;
    s.x.values[i] = std::sin(2.0 * M_PI * t);
  }
  sine.records.push_back(s);
  attach_target(sine, {TargetKind::Integral, 0.0});
  CHECK(std::abs(*sine.records[0].scalar_target) < 1e-6);

  attach_target(sine, {TargetKind::PointEval, 0.25});
  CHECK(*sine.records[0].scalar_target == doctest::Approx(1.0).epsilon(1e-4));

  attach_target(sine, {TargetKind::SquareIntegral, 0.0});
  CHECK(*sine.records[0].scalar_target == doctest::Approx(0.5).epsilon(1e-4));

  CHECK_THROWS(attach_target(sine, {TargetKind::PointEval, 1.5}));

  // SquareOperator of x = 2 is y = 4.
  Dataset two;
  Record t2;
  t2.id = "two";
  t2.x.grid = {0.0, 1.0};
  t2.x.values = {2.0, 2.0};
  two.records.push_back(t2);
  attach_target(two, {TargetKind::SquareOperator, 0.0});
  CHECK(two.records[0].function_target->values == Vec{4.0, 4.0});
}

TEST_CASE("verify embed suite passes on the default seed") {
  VerifyReport rep = run_verify("embed", 42);
  for (const auto& c : rep.checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.pass());
}

TEST_CASE("verify quantize suite passes across seeds") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    VerifyReport rep = run_verify("quantize", seed);
    for (const auto& c : rep.checks) {
      INFO("seed ", seed, " ", c.name, ": ", c.detail);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("mutation: a max-index tie-break fails the quantize oracle") {
  // Corrupted projector prefers the largest index among minimizers.
  Projector corrupted = [](const Codebook& cb, const Vec& w) {
    std::size_t best = 0;
    double best_d = sq_dist(w, cb.centers[0]);
    for (std::size_t r = 1; r < cb.centers.size(); ++r) {
      double d = sq_dist(w, cb.centers[r]);
      if (d <= best_d) {  // ties move to the higher index
        best = r;
        best_d = d;
      }
    }
    return best;
  };
  CheckResult bad = checks::metric_projection_oracle(42, 60, 16, corrupted);
  CHECK_FALSE(bad.pass);

  Projector stock = [](const Codebook& cb, const Vec& w) { return metric_project(cb, w); };
  CheckResult good = checks::metric_projection_oracle(42, 60, 16, stock);
  CHECK(good.pass);
}

TEST_CASE("dataset splits stay disjoint by id") {
  FamilySpec spec;
  spec.modes = 2;
  spec.bound = 1.0;
  spec.grid = 51;
  spec.count = 64;
  spec.seed = 9;
  Dataset all = gen_fourier_family(spec);
  Dataset train, test;
  train.meta = all.meta;
  train.meta.split = "train";
  test.meta = all.meta;
  test.meta.split = "test";
  for (std::size_t i = 0; i < all.records.size(); ++i)
    (i < 48 ? train : test).records.push_back(all.records[i]);
  std::set<std::string> train_ids, test_ids;
  for (const auto& r : train.records) train_ids.insert(r.id);
  for (const auto& r : test.records) test_ids.insert(r.id);
  for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);
}
