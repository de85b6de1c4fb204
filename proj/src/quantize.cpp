#include "qpnet/quantize.hpp"

#include <cmath>
#include <stdexcept>

namespace qpnet {

std::size_t metric_project(const Codebook& cb, const Vec& w) {
  if (cb.centers.empty()) throw std::invalid_argument("metric_project: empty codebook");
  std::size_t best = 0;
  double best_d = sq_dist(w, cb.centers[0]);
  for (std::size_t r = 1; r < cb.centers.size(); ++r) {
    double d = sq_dist(w, cb.centers[r]);
    if (d < best_d) {
      best = r;
      best_d = d;
    }
  }
  return best;
}

Codebook build_codebook(const std::vector<CodebookPoint>& points, double epsilon) {
  if (points.empty()) throw std::invalid_argument("build_codebook: no points");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_codebook: epsilon must be positive");
  Codebook cb;
  cb.epsilon = epsilon;
  for (const auto& p : points) {
    bool admit = true;
    for (const auto& c : cb.centers) {
      if (std::sqrt(sq_dist(p.encoded, c)) <= epsilon) {
        admit = false;
        break;
      }
    }
    if (admit) {
      cb.centers.push_back(p.encoded);
      cb.payload_refs.push_back(p.id);
      cb.payloads.push_back(p.payload);
    }
  }
  double radius = 0.0;
  for (const auto& p : points) {
    double best = std::sqrt(sq_dist(p.encoded, cb.centers[0]));
    for (std::size_t r = 1; r < cb.centers.size(); ++r)
      best = std::min(best, std::sqrt(sq_dist(p.encoded, cb.centers[r])));
    radius = std::max(radius, best);
  }
  cb.covering_radius = radius;
  return cb;
}

void BorelNet::validate() const {
  vnet.validate();
  if (codebook.centers.empty()) throw std::invalid_argument("BorelNet: empty codebook");
  if (vnet.out_dim() != codebook.centers[0].size())
    throw std::invalid_argument("BorelNet: vnet output length != center length");
  if (!target_encoder) throw std::invalid_argument("BorelNet: missing target encoder");
}

BorelPrediction predict_borel(const BorelNet& bnet, const FunctionSample& x) {
  const auto& enc = bnet.vnet.components.at(0).encoder;
  if (!enc) throw std::invalid_argument("predict_borel: vector net has no input encoder");
  CubePoint z = encode(*enc, x, bnet.vnet.components[0].truncation);
  Vec w = forward_vector(bnet.vnet, z);
  std::size_t r = metric_project(bnet.codebook, w);
  BorelPrediction out;
  out.payload = bnet.codebook.payloads.at(r);
  out.index = r;
  out.distance = std::sqrt(sq_dist(w, bnet.codebook.centers[r]));
  out.raw_output = std::move(w);
  return out;
}

VoronoiReport voronoi_preimage_check(const Codebook& cb, const std::vector<Vec>& samples) {
  VoronoiReport rep;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Vec& w = samples[s];
    std::size_t k = metric_project(cb, w);
    double dk = sq_dist(w, cb.centers[k]);
    double min_all = dk;
    for (const auto& c : cb.centers) min_all = std::min(min_all, sq_dist(w, c));
    if (!(dk <= min_all)) {
      rep.ok = false;
      rep.violating_sample = s;
      rep.detail = "chosen center is not a minimizer";
      return rep;
    }
    if (k > 0) {
      double min_before = sq_dist(w, cb.centers[0]);
      for (std::size_t u = 1; u < k; ++u)
        min_before = std::min(min_before, sq_dist(w, cb.centers[u]));
      if (!(dk < min_before)) {
        rep.ok = false;
        rep.violating_sample = s;
        rep.detail = "a smaller index attains the same distance";
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace qpnet
