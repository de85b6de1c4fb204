#include "qpnet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qpnet/dataset.hpp"
#include "qpnet/realize.hpp"
#include "qpnet/rng.hpp"
#include "qpnet/serialize.hpp"
#include "qpnet/train.hpp"

namespace qpnet {
namespace {

constexpr double kPiOverSqrt6 = 1.28254983016186409554;
constexpr std::size_t kFuzzGrid = 41;  // shared grid for weight-based encoders

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

FunctionSample random_fourier(std::mt19937_64& g, std::size_t grid, std::size_t max_modes,
                              double max_bound) {
  FamilySpec spec;
  spec.modes = g() % (max_modes + 1);
  spec.bound = uniform(g, 0.1, max_bound);
  spec.grid = grid;
  spec.count = 1;
  spec.seed = g();
  return gen_fourier_family(spec).records[0].x;
}

EncoderSpec make_encoder(std::mt19937_64& g, std::size_t kind, std::size_t capacity,
                         std::size_t grid) {
  switch (kind) {
    case 0:
      return dyadic_point_eval(capacity);
    case 1: {
      MetricLandmarkEncoder e;
      e.metric = (g() % 2 == 0) ? MetricKind::L2 : MetricKind::Sup;
      for (std::size_t i = 0; i < capacity; ++i)
        e.landmarks.push_back(random_fourier(g, 9, 2, 1.5));
      return e;
    }
    case 2: {
      LinearFunctionalEncoder e;
      for (std::size_t i = 0; i < capacity; ++i) {
        Vec w(grid);
        for (auto& v : w) v = normal(g) / static_cast<double>(grid);
        e.weights.push_back(std::move(w));
      }
      return e;
    }
    default: {
      ConvexPreservingEncoder e;
      for (std::size_t i = 0; i < capacity; ++i) {
        Vec w(grid);
        for (auto& v : w) v = normal(g) / std::sqrt(static_cast<double>(grid));
        e.functionals.push_back(std::move(w));
      }
      std::vector<FunctionSample> probe;
      for (int i = 0; i < 16; ++i) probe.push_back(random_fourier(g, grid, 3, 2.0));
      estimate_ranges(e, probe);
      return e;
    }
  }
}

RankOneActivation random_rank_one(std::mt19937_64& g, std::size_t n, GateKind gate) {
  RankOneActivation act;
  act.psi.resize(n);
  act.u_plus.resize(n);
  for (auto& v : act.psi) v = normal(g);
  for (auto& v : act.u_plus) v = normal(g);
  if (norm2(act.psi) == 0.0) act.psi[0] = 1.0;
  if (norm2(act.u_plus) == 0.0) act.u_plus[0] = 1.0;
  act.gate = gate;
  return act;
}

CubePoint random_cube_point(std::mt19937_64& g, std::size_t n) {
  CubePoint z;
  z.coords.resize(n);
  for (std::size_t i = 1; i <= n; ++i)
    z.coords[i - 1] = uniform01(g) / static_cast<double>(i);
  return z;
}

ScalarNet random_net(std::mt19937_64& g, std::size_t n, std::size_t j, GateKind gate) {
  return init_scalar_net(n, j, random_rank_one(g, n, gate), nullptr, g);
}

CheckResult failed(std::string name, std::string detail) {
  return CheckResult{std::move(name), false, false, std::move(detail)};
}

CheckResult passed(std::string name, std::string detail = {}) {
  return CheckResult{std::move(name), true, false, std::move(detail)};
}

}  // namespace

namespace checks {

CheckResult cube_containment(std::uint64_t seed, std::size_t inputs_per_encoder) {
  std::mt19937_64 g(derive_seed(seed, 1));
  const char* names[4] = {"point_eval", "metric_landmark", "linear_functional",
                          "convex_preserving"};
  for (std::size_t kind = 0; kind < 4; ++kind) {
    EncoderSpec enc = make_encoder(g, kind, 32, kFuzzGrid);
    for (std::size_t t = 0; t < inputs_per_encoder; ++t) {
      FunctionSample x = random_fourier(g, kFuzzGrid, 4, 3.0);
      if (t % 13 == 0) {
        // Extreme magnitudes push the normalizer to its clamped limits.
        double v = uniform(g, -1e6, 1e6);
        for (auto& y : x.values) y = v;
      }
      std::size_t n = 1 + g() % 32;
      CubePoint z = encode(enc, x, n);
      CubeReport rep = verify_cube(z);
      if (!rep.ok)
        return failed("embed.cube_containment",
                      std::string(names[kind]) + " produced a point outside the cube");
    }
  }
  return passed("embed.cube_containment");
}

CheckResult pseudometric_monotone(std::uint64_t seed, std::size_t pairs, double tol) {
  std::mt19937_64 g(derive_seed(seed, 2));
  for (std::size_t t = 0; t < pairs; ++t) {
    EncoderSpec enc = make_encoder(g, g() % 4, 32, kFuzzGrid);
    FunctionSample x = random_fourier(g, kFuzzGrid, 3, 2.0);
    FunctionSample y = random_fourier(g, kFuzzGrid, 3, 2.0);
    std::size_t n = 1 + g() % 31;
    std::size_t m = n + 1 + g() % (32 - n);
    if (pseudometric(enc, x, x, n) != 0.0)
      return failed("embed.pseudometric", "d(x,x) != 0");
    if (pseudometric(enc, x, y, n) != pseudometric(enc, y, x, n))
      return failed("embed.pseudometric", "not symmetric");
    double dn = pseudometric(enc, x, y, n);
    double dm = pseudometric(enc, x, y, m);
    if (!(dn <= dm + tol))
      return failed("embed.pseudometric",
                    "not monotone: d_N=" + fmt(dn) + " d_M=" + fmt(dm));
    double tail = 0.0;
    for (std::size_t i = n + 1; i <= m; ++i)
      tail += 1.0 / (static_cast<double>(i) * static_cast<double>(i));
    double cap = std::min(tail, 1.0 / static_cast<double>(n));
    if (!(dm * dm - dn * dn <= cap + tol))
      return failed("embed.pseudometric", "tail gap exceeded 1/N bound");
  }
  return passed("embed.pseudometric");
}

CheckResult convexity_preservation(std::uint64_t seed, std::size_t triples, double tol) {
  std::mt19937_64 g(derive_seed(seed, 3));
  const std::size_t grid = 65;
  const std::size_t dim = 5;  // constant + cos/sin for k=1,2
  Vec ts(grid);
  for (std::size_t j = 0; j < grid; ++j)
    ts[j] = static_cast<double>(j) / static_cast<double>(grid - 1);

  std::vector<Vec> basis(dim, Vec(grid));
  for (std::size_t j = 0; j < grid; ++j) {
    basis[0][j] = 1.0;
    basis[1][j] = std::cos(2.0 * M_PI * ts[j]);
    basis[2][j] = std::sin(2.0 * M_PI * ts[j]);
    basis[3][j] = std::cos(4.0 * M_PI * ts[j]);
    basis[4][j] = std::sin(4.0 * M_PI * ts[j]);
  }
  auto sample_of = [&](const Vec& c) {
    FunctionSample f;
    f.grid = ts;
    f.values.assign(grid, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < grid; ++j) f.values[j] += c[i] * basis[i][j];
    return f;
  };
  // Simplex of coefficients: c >= 0, sum c <= 1; vertices are 0 and e_i.
  auto random_simplex_point = [&]() {
    Vec e(dim + 1);
    double s = 0.0;
    for (auto& v : e) {
      v = -std::log(1.0 - uniform01(g));
      s += v;
    }
    Vec c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = e[i + 1] / s;
    return c;
  };

  ConvexPreservingEncoder enc;
  const std::size_t cap = 8;
  for (std::size_t n = 0; n < cap; ++n) {
    Vec w(grid);
    double lo = 0.0, hi = 0.0;
    do {
      for (auto& v : w) v = normal(g) / std::sqrt(static_cast<double>(grid));
      // Exact range over the simplex: attained at the vertices.
      lo = 0.0;
      hi = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        Vec c(dim, 0.0);
        c[i] = 1.0;
        FunctionSample v_i = sample_of(c);
        double val = 0.0;
        for (std::size_t k = 0; k < grid; ++k) val += w[k] * v_i.values[k];
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      }
    } while (hi - lo < 0.1);
    enc.functionals.push_back(w);
    enc.ranges.emplace_back(lo, hi);
  }

  EncoderSpec spec = enc;
  for (std::size_t t = 0; t < triples; ++t) {
    Vec ca = random_simplex_point();
    Vec cb = random_simplex_point();
    double lam = uniform(g, 0.01, 0.99);
    FunctionSample xa = sample_of(ca);
    FunctionSample xb = sample_of(cb);
    FunctionSample xc;
    xc.grid = ts;
    xc.values.resize(grid);
    for (std::size_t j = 0; j < grid; ++j)
      xc.values[j] = lam * xa.values[j] + (1.0 - lam) * xb.values[j];

    CubePoint za = encode(spec, xa, cap);
    CubePoint zb = encode(spec, xb, cap);
    CubePoint zc = encode(spec, xc, cap);
    for (std::size_t i = 0; i < cap; ++i) {
      double mix = lam * za.coords[i] + (1.0 - lam) * zb.coords[i];
      if (!(std::abs(zc.coords[i] - mix) <= tol))
        return failed("embed.convexity",
                      "coordinate " + std::to_string(i + 1) + " off by " +
                          fmt(std::abs(zc.coords[i] - mix)));
    }
  }
  return passed("embed.convexity");
}

CheckResult gate_limits() {
  for (GateKind gate : {GateKind::ReluTanh, GateKind::GatedTanh}) {
    if (gate_value(gate, 0.0) != 0.0) return failed("activation.gate_limits", "beta(0) != 0");
    for (double xi : {20.0, 25.0, 30.0, 40.0, 50.0}) {
      if (!(1.0 - gate_value(gate, xi) < 1e-8))
        return failed("activation.gate_limits", "upper limit too slow at xi=" + fmt(xi));
      if (!(std::abs(gate_value(gate, -xi)) < 1e-8))
        return failed("activation.gate_limits", "lower limit too slow at xi=" + fmt(-xi));
    }
    for (double xi = -5.0; xi <= 5.0; xi += 0.01)
      if (std::abs(gate_value(gate, xi)) > 1.0)
        return failed("activation.gate_limits", "|beta| > 1");
  }
  return passed("activation.gate_limits");
}

CheckResult gate_lipschitz_certificate() {
  // Dense sampling of |beta'| on [-50, 50]; the tails are monotone decaying.
  for (GateKind gate : {GateKind::ReluTanh, GateKind::GatedTanh}) {
    double bound = gate_lipschitz(gate);
    double max_d = 0.0;
    const double step = 1e-4;
    for (double xi = -50.0; xi <= 50.0; xi += step)
      max_d = std::max(max_d, std::abs(gate_derivative(gate, xi)));
    if (!(max_d <= bound))
      return failed("activation.gate_lipschitz",
                    "sampled |beta'| " + fmt(max_d) + " exceeds " + fmt(bound));
    if (std::abs(gate_derivative(gate, 50.0)) > 1e-8 ||
        std::abs(gate_derivative(gate, -50.0)) > 1e-8)
      return failed("activation.gate_lipschitz", "tail derivative not negligible");
  }
  return passed("activation.gate_lipschitz");
}

CheckResult activation_bounded(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 g(derive_seed(seed, 4));
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t n = 1 + g() % 12;
    GateKind gate = (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh;
    RankOneActivation act = random_rank_one(g, n, gate);
    Vec w(n);
    for (auto& v : w) v = uniform(g, -100.0, 100.0);
    double out = norm2(activate(ActivationSpec{act}, w));
    double cap = norm2(act.u_plus);
    if (!(out <= cap * (1.0 + 1e-12)))
      return failed("activation.bounded", "|sigma(w)| exceeded |u_plus|");
  }
  return passed("activation.bounded");
}

CheckResult activation_empirical_lipschitz(std::uint64_t seed, std::size_t pairs) {
  std::mt19937_64 g(derive_seed(seed, 5));
  for (std::size_t t = 0; t < pairs; ++t) {
    std::size_t n = 1 + g() % 10;
    GateKind gate = (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh;
    ActivationSpec act;
    if (g() % 4 == 0)
      act = ComponentwiseActivation{gate};
    else
      act = random_rank_one(g, n, gate);
    Vec w(n), wp(n);
    for (auto& v : w) v = uniform(g, -5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i) wp[i] = w[i] + uniform(g, -1.0, 1.0);
    double lhs = norm2(vsub(activate(act, w), activate(act, wp)));
    double rhs = lipschitz_bound(act) * norm2(vsub(w, wp));
    if (!(lhs <= rhs * (1.0 + 1e-9) + 1e-15))
      return failed("activation.empirical_lipschitz",
                    "|sigma(w)-sigma(w')| " + fmt(lhs) + " > bound " + fmt(rhs));
  }
  return passed("activation.empirical_lipschitz");
}

CheckResult separating_property(std::uint64_t seed, int trials, double lambda, double tol) {
  std::mt19937_64 g(derive_seed(seed, 6));
  for (GateKind gate : {GateKind::ReluTanh, GateKind::GatedTanh}) {
    std::size_t n = 2 + g() % 10;
    RankOneActivation act = random_rank_one(g, n, gate);
    // The GatedTanh tail decays like e^{-xi}, so the worst admitted
    // direction (|psi.x| = 0.1) needs lambda >= 300 to undercut 1e-6.
    double lam = gate == GateKind::GatedTanh ? std::max(lambda, 300.0) : lambda;
    SeparationReport rep = check_separating(ActivationSpec{act}, lam, trials, tol, g());
    if (!rep.pass) return failed("activation.separating", rep.detail);
  }
  return passed("activation.separating");
}

CheckResult lambda_consistency(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 g(derive_seed(seed, 7));
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + g() % 16;
    ScalarNet net = random_net(g, n, 1 + g() % 4,
                               (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh);
    ScalarNet same = project_params(net, n);
    for (int k = 0; k < 5; ++k) {
      CubePoint z = random_cube_point(g, n);
      if (forward_scalar(net, z) != forward_scalar(same, z))
        return failed("net.lambda_consistency", "projection at N'=N changed the output");
    }
  }
  return passed("net.lambda_consistency");
}

CheckResult net_bounded(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 g(derive_seed(seed, 8));
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + g() % 12;
    ScalarNet net = random_net(g, n, 1 + g() % 5, GateKind::GatedTanh);
    const auto& act = std::get<RankOneActivation>(net.activation);
    double cap = 0.0;
    for (const auto& nr : net.neurons) cap += norm2(nr.h) * norm2(act.u_plus);
    for (int k = 0; k < 5; ++k) {
      CubePoint z = random_cube_point(g, n);
      if (!(std::abs(forward_scalar(net, z)) <= cap * (1.0 + 1e-9) + 1e-15))
        return failed("net.bounded", "|forward| exceeded sum |h_j||u_plus|");
    }
  }
  return passed("net.bounded");
}

CheckResult net_input_lipschitz(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 g(derive_seed(seed, 9));
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + g() % 10;
    ScalarNet net = random_net(g, n, 1 + g() % 4,
                               (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh);
    const auto& act = std::get<RankOneActivation>(net.activation);
    double coeff = 0.0;
    for (const auto& nr : net.neurons)
      coeff += norm2(nr.h) * norm2(act.u_plus) * gate_lipschitz(act.gate) * norm2(act.psi) *
               frobenius(nr.B);
    CubePoint z = random_cube_point(g, n);
    CubePoint zp = random_cube_point(g, n);
    double lhs = std::abs(forward_scalar(net, z) - forward_scalar(net, zp));
    double rhs = coeff * std::sqrt(sq_dist(z.coords, zp.coords));
    if (!(lhs <= rhs * (1.0 + 1e-9) + 1e-15))
      return failed("net.input_lipschitz", "Lipschitz bound violated: " + fmt(lhs) + " > " + fmt(rhs));
  }
  return passed("net.input_lipschitz");
}

CheckResult projection_error_decay(std::uint64_t seed, std::size_t ref_truncation,
                                   std::size_t inputs, double threshold) {
  std::mt19937_64 g(derive_seed(seed, 10));
  const std::size_t m = ref_truncation;
  EncoderSpec enc = dyadic_point_eval(m);
  ScalarNet net = random_net(g, m, 8, GateKind::GatedTanh);

  std::vector<FunctionSample> xs;
  for (std::size_t i = 0; i < inputs; ++i) xs.push_back(random_fourier(g, 101, 3, 1.0));
  std::vector<CubePoint> full;
  for (const auto& x : xs) full.push_back(encode(enc, x, m));
  std::vector<double> ref;
  for (const auto& z : full) ref.push_back(forward_scalar(net, z));

  std::ostringstream curve;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_n = 0;
  for (std::size_t np = 1; np <= m; ++np) {
    ScalarNet proj = project_params(net, np);
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CubePoint zn = encode(enc, xs[i], np);
      err = std::max(err, std::abs(forward_scalar(proj, zn) - ref[i]));
    }
    if (np == m && err != 0.0)
      return failed("net.projection_decay", "error at N'=M is not exactly zero");
    if (err < best) {
      best = err;
      best_n = np;
    }
    if (np == 1 || np % 8 == 0 || np == m)
      curve << " N'=" << np << ":" << fmt(err);
    if (err < threshold) {
      return passed("net.projection_decay",
                    "reached " + fmt(err) + " at N'=" + std::to_string(np) + ";" + curve.str());
    }
  }
  return failed("net.projection_decay",
                "never fell below " + fmt(threshold) + "; best " + fmt(best) + " at N'=" +
                    std::to_string(best_n) + ";" + curve.str());
}

CheckResult metric_projection_oracle(std::uint64_t seed, std::size_t queries_per_size,
                                     std::size_t max_size, const Projector& projector) {
  std::mt19937_64 g(derive_seed(seed, 11));
  for (std::size_t r = 1; r <= max_size; ++r) {
    std::size_t dim = 2 + g() % 5;
    Codebook cb;
    cb.covering_radius = 0.0;
    cb.epsilon = 0.0;
    // Integer-valued centers so constructed ties are exact in floating point.
    std::set<std::vector<long>> used;
    while (cb.centers.size() < r) {
      std::vector<long> key(dim);
      Vec c(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        key[k] = static_cast<long>(g() % 17) - 8;
        c[k] = static_cast<double>(key[k]);
      }
      if (used.insert(key).second) {
        cb.centers.push_back(c);
        cb.payload_refs.push_back("c" + std::to_string(cb.centers.size() - 1));
        cb.payloads.push_back(FunctionSample{{0.0, 1.0}, {0.0, 0.0}});
      }
    }

    std::vector<Vec> queries;
    for (std::size_t q = 0; q < queries_per_size; ++q) {
      Vec w(dim);
      if (q % 3 == 0) {
        // Integer query at an integer offset from a center; near-tie territory.
        std::size_t i = g() % r;
        for (std::size_t k = 0; k < dim; ++k)
          w[k] = cb.centers[i][k] + static_cast<double>(static_cast<long>(g() % 9) - 4);
      } else {
        for (auto& v : w) v = uniform(g, -10.0, 10.0);
      }
      queries.push_back(std::move(w));
    }

    for (const auto& w : queries) {
      // Brute-force min-index scan, written out independently of metric_project.
      std::size_t oracle = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cb.centers.size(); ++k) {
        double dist = 0.0;
        for (std::size_t u = 0; u < dim; ++u) {
          double dd = w[u] - cb.centers[k][u];
          dist += dd * dd;
        }
        if (dist < best) {
          best = dist;
          oracle = k;
        }
      }
      std::size_t got = projector(cb, w);
      if (got != oracle)
        return failed("quantize.oracle", "index mismatch at R=" + std::to_string(r) +
                                             ": got " + std::to_string(got) + " expected " +
                                             std::to_string(oracle));
    }
    VoronoiReport vr = voronoi_preimage_check(cb, queries);
    if (!vr.ok) return failed("quantize.voronoi", vr.detail);

    // Idempotence on centers.
    for (std::size_t k = 0; k < cb.centers.size(); ++k)
      if (projector(cb, cb.centers[k]) != k)
        return failed("quantize.oracle", "projection not idempotent on center " +
                                             std::to_string(k));
  }

  // Constructed exact ties: the query sits at the integer midpoint of the
  // pair (w+d, w-d), every other center is a strictly larger multiple of d
  // away, so the pair attains the minimum and the smaller index must win.
  for (std::size_t r = 2; r <= max_size; r += 1 + g() % 7) {
    std::size_t dim = 2 + g() % 4;
    Vec w(dim), d(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      w[k] = static_cast<double>(static_cast<long>(g() % 9) - 4);
      d[k] = static_cast<double>(static_cast<long>(g() % 4) + 1);
    }
    std::size_t pos = g() % (r - 1);  // pair occupies pos, pos+1
    Codebook cb;
    std::size_t mult = 2;
    for (std::size_t k = 0; k < r; ++k) {
      Vec c;
      if (k == pos)
        c = vadd(w, d);
      else if (k == pos + 1)
        c = vsub(w, d);
      else {
        c = vadd(w, vscale(static_cast<double>(mult), d));
        ++mult;
      }
      cb.centers.push_back(std::move(c));
      cb.payload_refs.push_back("c" + std::to_string(k));
      cb.payloads.push_back(FunctionSample{{0.0, 1.0}, {0.0, 0.0}});
    }
    std::size_t got = projector(cb, w);
    if (got != pos)
      return failed("quantize.oracle", "tie at R=" + std::to_string(r) +
                                           " resolved to index " + std::to_string(got) +
                                           " instead of " + std::to_string(pos));
    VoronoiReport vr = voronoi_preimage_check(cb, {w});
    if (!vr.ok) return failed("quantize.voronoi", "tie sample: " + vr.detail);
  }
  return passed("quantize.oracle");
}

CheckResult quantize_error_decomposition(std::uint64_t seed, std::size_t points) {
  std::mt19937_64 g(derive_seed(seed, 12));
  const std::size_t dim = 4;
  std::vector<CodebookPoint> build;
  for (std::size_t i = 0; i < points; ++i) {
    Vec t(dim);
    for (auto& v : t) v = uniform(g, -1.0, 1.0);
    build.push_back({t, "p" + std::to_string(i), FunctionSample{{0.0, 1.0}, {0.0, 0.0}}});
  }
  double eps = uniform(g, 0.2, 0.6);
  Codebook cb = build_codebook(build, eps);
  if (!(cb.covering_radius <= eps))
    return failed("quantize.decomposition", "covering radius exceeded epsilon");
  for (const auto& p : build) {
    Vec w(dim);
    for (std::size_t k = 0; k < dim; ++k) w[k] = p.encoded[k] + 0.3 * normal(g);
    std::size_t r = metric_project(cb, w);
    double lhs = std::sqrt(sq_dist(p.encoded, cb.centers[r]));
    double net_err = std::sqrt(sq_dist(p.encoded, w));
    if (!(lhs <= 2.0 * net_err + cb.covering_radius + 1e-12))
      return failed("quantize.decomposition",
                    "triangle bound violated: " + fmt(lhs) + " > 2*" + fmt(net_err) + "+" +
                        fmt(cb.covering_radius));
  }
  return passed("quantize.decomposition");
}

CheckResult codebook_covering(std::uint64_t seed, std::size_t builds) {
  std::mt19937_64 g(derive_seed(seed, 13));
  for (std::size_t b = 0; b < builds; ++b) {
    std::size_t dim = 1 + g() % 4;
    std::size_t count = 1 + g() % 60;
    std::vector<CodebookPoint> pts;
    for (std::size_t i = 0; i < count; ++i) {
      Vec t(dim);
      for (auto& v : t) v = uniform(g, -1.0, 1.0);
      pts.push_back({t, "p" + std::to_string(i), FunctionSample{{0.0, 1.0}, {0.0, 0.0}}});
    }
    double eps = uniform(g, 0.05, 1.0);
    Codebook cb = build_codebook(pts, eps);
    if (!(cb.covering_radius <= eps))
      return failed("quantize.covering", "covering radius exceeds epsilon");
    for (const auto& p : pts) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : cb.centers) best = std::min(best, std::sqrt(sq_dist(p.encoded, c)));
      if (!(best <= cb.covering_radius))
        return failed("quantize.covering", "build point outside covering radius");
    }
    // Tiny epsilon admits every distinct point as a center with radius 0.
    Codebook all = build_codebook(pts, 1e-12);
    if (all.centers.size() != pts.size() || all.covering_radius != 0.0)
      return failed("quantize.covering", "tiny-epsilon cover is not the identity");
    Codebook one = build_codebook({pts[0]}, eps);
    if (one.centers.size() != 1 || one.covering_radius != 0.0)
      return failed("quantize.covering", "single-point cover malformed");
  }
  return passed("quantize.covering");
}

CheckResult ext_norms(std::uint64_t seed, std::size_t cases, double tol) {
  std::mt19937_64 g(derive_seed(seed, 14));
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + g() % 12;
    std::size_t m = n + g() % 13;
    Vec h(n), y(n), v(m);
    for (auto& x : h) x = normal(g);
    for (auto& x : y) x = normal(g);
    for (auto& x : v) x = normal(g);
    Mat beta(n);
    for (auto& x : beta.a) x = normal(g);

    Vec h_ext = ext1(h, m);
    Vec y_ext = ext3(y, m);
    for (std::size_t i = n; i < m; ++i)
      if (h_ext[i] != 0.0 || y_ext[i] != 0.0)
        return failed("realize.ext_norms", "padding is not exactly zero");
    if (!(std::abs(norm2(h_ext) - norm2(h)) <= tol * std::max(1.0, norm2(h))))
      return failed("realize.ext_norms", "|ext1(h)| != |h|");
    if (!(std::abs(norm2(y_ext) - norm2(y)) <= tol * std::max(1.0, norm2(y))))
      return failed("realize.ext_norms", "|ext3(y)| != |y|");

    Mat big = ext2(beta, m);
    Vec bv = matvec(big, v);
    double bound = frobenius(beta) * norm2(v);
    if (!(norm2(bv) <= bound * (1.0 + tol)))
      return failed("realize.ext_norms", "|ext2(beta)v| exceeded |beta|_F |v|");
  }
  return passed("realize.ext_norms");
}

CheckResult replication_identities(std::uint64_t seed, std::size_t cases,
                                   std::size_t max_truncation) {
  std::mt19937_64 g(derive_seed(seed, 15));
  for (std::size_t t = 0; t < cases; ++t) {
    std::size_t n = 1 + g() % (max_truncation - 1);
    std::size_t m = n + 1 + g() % (max_truncation - n);

    // Replication of functionals: Ext1 of the leading block acts as phi o Pi_N.
    Vec phi(m), v(m), b(m);
    for (auto& x : phi) x = normal(g);
    for (auto& x : v) x = normal(g);
    for (auto& x : b) x = normal(g);
    Vec phi_n(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(n));
    double lhs1 = dot(ext1(phi_n, m), v);
    double rhs1 = dot(phi_n, Vec(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)));
    if (lhs1 != rhs1) return failed("realize.replication", "Ext1 identity broke");

    // Replication of operators: Ext2 of the leading block acts as Pi_N A Pi_N.
    Mat a(m);
    for (auto& x : a.a) x = normal(g);
    Mat lead(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) lead.at(i, k) = a.at(i, k);
    Mat pnapn(m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) pnapn.at(i, k) = a.at(i, k);
    Vec e2 = matvec(ext2(lead, m), v);
    Vec pv = matvec(pnapn, v);
    // Pi_N zeroes the tail of the argument before A acts; rows beyond N vanish
    // either way, and leading rows only read the leading v entries.
    for (std::size_t i = 0; i < m; ++i)
      if (e2[i] != pv[i]) return failed("realize.replication", "Ext2 identity broke");

    // Replication of shifts.
    Vec b_n(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n));
    Vec e3 = ext3(b_n, m);
    for (std::size_t i = 0; i < m; ++i) {
      double want = i < n ? b[i] : 0.0;
      if (e3[i] != want) return failed("realize.replication", "Ext3 identity broke");
    }

    // Padded forward equals projected forward on inputs whose tail
    // coordinates are arbitrary.
    ScalarNet net = random_net(g, n, 1 + g() % 3,
                               (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh);
    ScalarNet padded = pad_net(net, m);
    CubePoint zm = random_cube_point(g, m);
    CubePoint zn;
    zn.coords.assign(zm.coords.begin(), zm.coords.begin() + static_cast<std::ptrdiff_t>(n));
    if (forward_scalar(padded, zm) != forward_scalar(net, zn))
      return failed("realize.replication", "padded forward != projected forward");

    // realize delegates to the same forward path.
    RealizedMap rm = realize(pack_params(net), net.activation, nullptr);
    if (rm.eval_encoded(zn) != forward_scalar(net, zn))
      return failed("realize.replication", "realize does not delegate to forward");
  }
  return passed("realize.replication");
}

CheckResult realization_stability(std::uint64_t seed, std::size_t perturbations,
                                  std::size_t inputs) {
  std::mt19937_64 g(derive_seed(seed, 16));
  const std::size_t n = 8;
  EncoderSpec enc = dyadic_point_eval(n);
  std::vector<CubePoint> zs;
  for (std::size_t i = 0; i < inputs; ++i) {
    CubePoint z = encode(enc, random_fourier(g, 33, 3, 1.5), n);
    if (!(z.norm() <= kPiOverSqrt6 + 1e-12))
      return failed("realize.stability", "encoded input escaped the cube norm bound");
    zs.push_back(std::move(z));
  }

  for (std::size_t t = 0; t < perturbations; ++t) {
    GateKind gate = (g() % 2 == 0) ? GateKind::ReluTanh : GateKind::GatedTanh;
    ActivationSpec act = random_rank_one(g, n, gate);
    NeuronParams p;
    p.h.resize(n);
    p.y.resize(n);
    p.B = Mat(n);
    for (auto& x : p.h) x = normal(g);
    for (auto& x : p.y) x = normal(g);
    for (auto& x : p.B.a) x = 0.5 * normal(g);

    NeuronParams q = p;
    double delta = std::pow(10.0, uniform(g, -4.0, 0.0));
    switch (t % 4) {
      case 0:
        for (auto& x : q.h) x += delta * normal(g);
        break;
      case 1:
        for (auto& x : q.y) x += delta * normal(g);
        break;
      case 2:
        for (auto& x : q.B.a) x += delta * normal(g);
        break;
      default:
        for (auto& x : q.h) x += delta * normal(g);
        for (auto& x : q.y) x += delta * normal(g);
        for (auto& x : q.B.a) x += delta * normal(g);
        break;
    }
    auto pairs = stability_check(p, q, zs, act);
    for (const auto& pr : pairs)
      if (!(pr.lhs <= pr.rhs + 1e-12 * std::max(1.0, pr.rhs)))
        return failed("realize.stability",
                      "lhs " + fmt(pr.lhs) + " exceeded rhs " + fmt(pr.rhs));
    auto same = stability_check(p, p, zs, act);
    for (const auto& pr : same)
      if (pr.lhs != 0.0 || pr.rhs != 0.0)
        return failed("realize.stability", "identical params must give lhs=rhs=0");
  }
  return passed("realize.stability");
}

CheckResult parameter_continuity(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 17));
  const std::size_t n = 6;
  EncoderSpec enc = dyadic_point_eval(n);
  std::vector<CubePoint> zs;
  for (int i = 0; i < 20; ++i) zs.push_back(encode(enc, random_fourier(g, 33, 2, 1.0), n));

  ActivationSpec act = random_rank_one(g, n, GateKind::GatedTanh);
  NeuronParams p;
  p.h.resize(n);
  p.y.resize(n);
  p.B = Mat(n);
  for (auto& x : p.h) x = normal(g);
  for (auto& x : p.y) x = normal(g);
  for (auto& x : p.B.a) x = 0.5 * normal(g);
  NeuronParams dir = p;
  for (auto& x : dir.h) x = normal(g);
  for (auto& x : dir.y) x = normal(g);
  for (auto& x : dir.B.a) x = normal(g);

  double prev_sup = std::numeric_limits<double>::infinity();
  double sup = 0.0, rhs_max = 0.0;
  for (int k = 1; k <= 8; ++k) {
    double delta = std::pow(10.0, -k);
    NeuronParams q = p;
    for (std::size_t i = 0; i < n; ++i) {
      q.h[i] += delta * dir.h[i];
      q.y[i] += delta * dir.y[i];
    }
    for (std::size_t i = 0; i < n * n; ++i) q.B.a[i] += delta * dir.B.a[i];
    auto pairs = stability_check(q, p, zs, act);
    sup = 0.0;
    rhs_max = 0.0;
    for (const auto& pr : pairs) {
      sup = std::max(sup, pr.lhs);
      rhs_max = std::max(rhs_max, pr.rhs);
    }
    // Monotone once delta is inside the linear regime.
    if (k >= 4 && !(sup <= prev_sup + 1e-12))
      return failed("realize.parameter_continuity", "sup |difference| not shrinking");
    prev_sup = sup;
  }
  if (!(sup < 1e-5 && rhs_max < 1e-4))
    return failed("realize.parameter_continuity",
                  "theta_k -> theta did not drive the sup to zero: sup=" + fmt(sup) +
                      " rhs=" + fmt(rhs_max));
  return passed("realize.parameter_continuity",
                "sup at delta=1e-8: " + fmt(sup) + ", rhs bound " + fmt(rhs_max));
}

CheckResult gradient_oracle(std::uint64_t seed, std::size_t pairs, double step, double tol) {
  std::mt19937_64 g(derive_seed(seed, 18));
  double worst = 0.0;
  std::string where;
  // Targets sit within 0.1 of the model output so the loss stays small and
  // the central-difference oracle resolves every component down to the
  // 1e-8 denominator clamp.
  for (std::size_t t = 0; t < pairs; ++t) {
    std::size_t n = 2 + g() % 5;
    std::size_t j = 1 + g() % 3;
    FdReport rep;
    if (t % 3 == 2) {
      std::size_t mcomp = 1 + g() % 3;
      std::size_t kdim = 1 + g() % 4;
      VectorNet vnet = init_vector_net(n, j, mcomp, kdim,
                                       random_rank_one(g, n, GateKind::GatedTanh), nullptr, g);
      std::vector<VectorSample> batch(1 + g() % 4);
      for (auto& s : batch) {
        s.z = random_cube_point(g, n);
        s.target = forward_vector(vnet, s.z);
        for (auto& v : s.target) v += uniform(g, -0.1, 0.1);
      }
      rep = fd_check(vnet, batch, step);
    } else {
      ActivationSpec act;
      if (t % 5 == 4)
        act = ComponentwiseActivation{GateKind::GatedTanh};
      else
        act = random_rank_one(g, n, GateKind::GatedTanh);
      ScalarNet net = init_scalar_net(n, j, act, nullptr, g);
      std::vector<ScalarSample> batch(1 + g() % 4);
      for (auto& s : batch) {
        s.z = random_cube_point(g, n);
        s.target = forward_scalar(net, s.z) + uniform(g, -0.1, 0.1);
      }
      rep = fd_check(net, batch, step);
    }
    if (rep.refused) return failed("train.gradient_oracle", "oracle unexpectedly refused");
    if (rep.max_rel_err > worst) {
      worst = rep.max_rel_err;
      where = rep.worst_component;
    }
  }
  if (!(worst < tol))
    return failed("train.gradient_oracle",
                  "max relative error " + fmt(worst) + " at " + where);
  return passed("train.gradient_oracle", "max relative error " + fmt(worst));
}

CheckResult train_determinism(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 19));
  const std::size_t n = 6;
  EncoderSpec enc = dyadic_point_eval(n);
  std::vector<ScalarSample> data;
  for (int i = 0; i < 32; ++i) {
    FunctionSample x = random_fourier(g, 65, 3, 1.0);
    data.push_back({encode(enc, x, n), trapezoid(x)});
  }
  TrainConfig cfg;
  cfg.optimizer = AdamConfig{1e-3, 0.9, 0.999, 1e-8};
  cfg.steps = 50;
  cfg.batch_size = 8;
  cfg.seed = 777;

  auto run = [&](std::uint64_t init_seed) {
    std::mt19937_64 gi(init_seed);
    ScalarNet net = init_scalar_net(n, 8, default_rank_one(n, GateKind::GatedTanh),
                                    std::make_shared<const EncoderSpec>(enc), gi);
    FitResult res = fit(net, data, cfg);
    return std::pair<std::string, std::vector<double>>(model_to_json(net).dump(),
                                                       res.loss_history);
  };
  auto a = run(123);
  auto b = run(123);
  if (a.first != b.first)
    return failed("train.determinism", "serialized models differ between identical runs");
  if (a.second != b.second)
    return failed("train.determinism", "loss histories differ between identical runs");
  return passed("train.determinism");
}

CheckResult lr_zero_identity(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 20));
  const std::size_t n = 5;
  std::vector<ScalarSample> data;
  for (int i = 0; i < 8; ++i) data.push_back({random_cube_point(g, n), normal(g)});
  for (int opt = 0; opt < 2; ++opt) {
    ScalarNet net = random_net(g, n, 3, GateKind::GatedTanh);
    std::string before = model_to_json(net).dump();
    TrainConfig cfg;
    if (opt == 0)
      cfg.optimizer = SgdConfig{0.0};
    else
      cfg.optimizer = AdamConfig{0.0, 0.9, 0.999, 1e-8};
    cfg.steps = 10;
    cfg.batch_size = 4;
    cfg.seed = 5;
    fit(net, data, cfg);
    if (model_to_json(net).dump() != before)
      return failed("train.lr_zero", "lr=0 changed the model");
  }
  return passed("train.lr_zero");
}

CheckResult descent_sanity(std::uint64_t seed) {
  std::mt19937_64 g(derive_seed(seed, 21));
  const std::size_t n = 6;
  EncoderSpec enc = dyadic_point_eval(n);
  std::vector<ScalarSample> data;
  for (int i = 0; i < 32; ++i) {
    FunctionSample x = random_fourier(g, 65, 3, 1.0);
    data.push_back({encode(enc, x, n), trapezoid(x)});
  }
  ScalarNet net = init_scalar_net(n, 8, default_rank_one(n, GateKind::GatedTanh), nullptr, g);
  for (auto& nr : net.neurons) {
    for (auto& v : nr.h) v *= 0.2;
    for (auto& v : nr.B.a) v *= 0.2;
    for (auto& v : nr.y) v *= 0.2;
  }
  TrainConfig cfg;
  cfg.optimizer = SgdConfig{1e-3};
  cfg.steps = 10;
  cfg.batch_size = data.size();
  cfg.seed = 11;
  FitResult res = fit(net, data, cfg);
  for (std::size_t i = 1; i < res.loss_history.size(); ++i)
    if (res.loss_history[i] > res.loss_history[i - 1])
      return CheckResult{"train.descent_sanity", false, true,
                         "loss increased at step " + std::to_string(i)};
  return CheckResult{"train.descent_sanity", true, true,
                     "loss non-increasing over " + std::to_string(res.loss_history.size()) +
                         " full-batch SGD steps"};
}

CheckResult uap_scalar_demo(std::uint64_t seed, std::size_t steps, double loss_threshold) {
  FamilySpec fam;
  fam.modes = 3;
  fam.bound = 1.0;
  fam.grid = 201;
  fam.count = 128;
  fam.seed = seed;
  Dataset ds = gen_fourier_family(fam);
  attach_target(ds, {TargetKind::Integral, 0.0});

  const std::size_t n = 8;
  auto enc = std::make_shared<const EncoderSpec>(fourier_functionals(n, fam.grid));
  std::vector<ScalarSample> data;
  for (const auto& r : ds.records) data.push_back({encode(*enc, r.x, n), *r.scalar_target});

  std::mt19937_64 g(derive_seed(seed, 22));
  RankOneActivation act = default_rank_one(n, GateKind::GatedTanh);
  for (auto& v : act.psi) v *= 16.0;
  ScalarNet net = init_scalar_net(n, 16, act, enc, g);
  TrainConfig cfg;
  cfg.optimizer = AdamConfig{1e-2, 0.9, 0.999, 1e-8};
  cfg.steps = steps;
  cfg.batch_size = data.size();
  cfg.seed = seed;
  FitResult res = fit(net, data, cfg);
  if (res.diverged)
    return failed("uap.scalar_demo", "diverged at step " + std::to_string(res.divergence_step));
  double final_loss = loss_mse(net, data);
  if (!(final_loss < loss_threshold))
    return failed("uap.scalar_demo", "final loss " + fmt(final_loss) + " not below " +
                                         fmt(loss_threshold));
  return passed("uap.scalar_demo", "final loss " + fmt(final_loss) + " after " +
                                       std::to_string(steps) + " steps");
}

CheckResult pipeline_bound(std::uint64_t seed, std::size_t target_grid, std::size_t truncation,
                           double epsilon, std::size_t train_steps) {
  FamilySpec fam;
  fam.modes = 2;
  fam.bound = 1.0;
  fam.grid = target_grid;
  fam.count = 96;
  fam.seed = seed;
  Dataset ds = gen_fourier_family(fam);
  attach_target(ds, {TargetKind::SquareOperator, 0.0});

  const std::size_t n = truncation;
  auto in_enc = std::make_shared<const EncoderSpec>(dyadic_point_eval(n));
  auto tgt_enc = std::make_shared<const EncoderSpec>(dyadic_point_eval(n));

  std::vector<VectorSample> all;
  std::vector<CodebookPoint> points;
  for (const auto& r : ds.records) {
    VectorSample s;
    s.z = encode(*in_enc, r.x, n);
    CubePoint t = encode(*tgt_enc, *r.function_target, n);
    s.target = t.coords;
    all.push_back(s);
    points.push_back({t.coords, r.id, *r.function_target});
  }
  const std::size_t train_count = (all.size() * 2) / 3;
  std::vector<VectorSample> train_set(all.begin(),
                                      all.begin() + static_cast<std::ptrdiff_t>(train_count));

  std::mt19937_64 g(derive_seed(seed, 23));
  VectorNet vnet = init_vector_net(n, 6, 6, n, default_rank_one(n, GateKind::GatedTanh),
                                   in_enc, g);
  TrainConfig cfg;
  cfg.optimizer = AdamConfig{1e-2, 0.9, 0.999, 1e-8};
  cfg.steps = train_steps;
  cfg.batch_size = train_set.size();
  cfg.seed = seed;
  FitResult res = fit(vnet, train_set, cfg);
  if (res.diverged) return failed("uap.pipeline_bound", "vector net diverged");

  // Centers live inside the encoded image of the whole working set, mirroring
  // a cover of H(g(K)).
  Codebook cb = build_codebook(points, epsilon);
  if (!(cb.covering_radius <= epsilon))
    return failed("uap.pipeline_bound", "covering radius exceeds epsilon");

  BorelNet bnet{vnet, cb, tgt_enc};
  bnet.validate();

  double worst_ratio = 0.0;
  for (std::size_t i = train_count; i < all.size(); ++i) {
    const auto& rec = ds.records[i];
    BorelPrediction pred = predict_borel(bnet, rec.x);
    Vec truth = all[i].target;
    double encoded_err = std::sqrt(sq_dist(truth, cb.centers[pred.index]));
    double net_err = std::sqrt(sq_dist(truth, pred.raw_output));
    double bound = 2.0 * net_err + cb.covering_radius;
    if (!(encoded_err <= bound + 1e-12))
      return failed("uap.pipeline_bound", "encoded error " + fmt(encoded_err) +
                                              " exceeded bound " + fmt(bound));
    // d_H between true target and decoded payload agrees with the center error.
    CubePoint decoded = encode(*tgt_enc, pred.payload, n);
    double dh = std::sqrt(sq_dist(truth, decoded.coords));
    if (dh != encoded_err)
      return failed("uap.pipeline_bound", "payload re-encoding disagrees with its center");
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, encoded_err / bound);
  }
  return passed("uap.pipeline_bound",
                "R=" + std::to_string(cb.size()) + " covering_radius=" +
                    fmt(cb.covering_radius) + " worst error/bound ratio " + fmt(worst_ratio));
}

}  // namespace checks

VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
  VerifyReport rep;
  rep.suite = suite;
  rep.seed = seed;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };

  if (want("embed")) {
    rep.checks.push_back(checks::cube_containment(seed, 500));
    rep.checks.push_back(checks::pseudometric_monotone(seed, 200, 1e-12));
    rep.checks.push_back(checks::convexity_preservation(seed, 200, 1e-12));
  }
  if (want("activation")) {
    rep.checks.push_back(checks::gate_limits());
    rep.checks.push_back(checks::gate_lipschitz_certificate());
    rep.checks.push_back(checks::activation_bounded(seed, 500));
    rep.checks.push_back(checks::activation_empirical_lipschitz(seed, 10000));
    rep.checks.push_back(checks::separating_property(seed, 300, 100.0, 1e-6));
  }
  if (want("net")) {
    rep.checks.push_back(checks::lambda_consistency(seed, 100));
    rep.checks.push_back(checks::net_bounded(seed, 200));
    rep.checks.push_back(checks::net_input_lipschitz(seed, 500));
    rep.checks.push_back(checks::projection_error_decay(seed, 32, 50, 1e-3));
  }
  if (want("quantize")) {
    Projector stock = [](const Codebook& cb, const Vec& w) { return metric_project(cb, w); };
    rep.checks.push_back(checks::metric_projection_oracle(seed, 60, 64, stock));
    rep.checks.push_back(checks::quantize_error_decomposition(seed, 150));
    rep.checks.push_back(checks::codebook_covering(seed, 40));
  }
  if (want("realize")) {
    rep.checks.push_back(checks::ext_norms(seed, 500, 1e-12));
    rep.checks.push_back(checks::replication_identities(seed, 100, 32));
    rep.checks.push_back(checks::realization_stability(seed, 100, 50));
    rep.checks.push_back(checks::parameter_continuity(seed));
  }
  if (want("train")) {
    rep.checks.push_back(checks::gradient_oracle(seed, 30, 1e-5, 1e-4));
    rep.checks.push_back(checks::train_determinism(seed));
    rep.checks.push_back(checks::lr_zero_identity(seed));
    rep.checks.push_back(checks::descent_sanity(seed));
  }
  if (want("uap")) {
    rep.checks.push_back(checks::uap_scalar_demo(seed, 800, 2e-3));
    rep.checks.push_back(checks::pipeline_bound(seed, 101, 16, 0.1, 300));
  }
  return rep;
}

}  // namespace qpnet
