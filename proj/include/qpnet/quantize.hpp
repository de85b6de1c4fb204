#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpnet/encoder.hpp"
#include "qpnet/function_sample.hpp"
#include "qpnet/net.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Metric projection with smallest-index tie-breaking, greedy eps-net
// codebooks over encoded targets, and the Borel network pipeline for
// quasi-Polish outputs.
// ---------------------------------------------------------------------------

struct Codebook {
  std::vector<Vec> centers;               // pairwise distinct
  std::vector<std::string> payload_refs;  // ids into the dataset that built this book
  std::vector<FunctionSample> payloads;   // decoded targets, aligned with centers
  double covering_radius = 0.0;           // measured over the build set, <= epsilon
  double epsilon = 0.0;

  std::size_t size() const { return centers.size(); }
};

// Nearest-center index (0-based). Ties are broken toward the smallest index
// by exact comparison of the computed squared distances; no tolerance band.
std::size_t metric_project(const Codebook& cb, const Vec& w);

struct CodebookPoint {
  Vec encoded;
  std::string id;
  FunctionSample payload;
};

// Greedy first-fit cover: scan points in input order, admit a point as a new
// center iff its distance to every current center exceeds epsilon.
Codebook build_codebook(const std::vector<CodebookPoint>& points, double epsilon);

struct BorelNet {
  VectorNet vnet;  // output lives in the encoded target space
  Codebook codebook;
  std::shared_ptr<const EncoderSpec> target_encoder;  // the map H

  void validate() const;
};

struct BorelPrediction {
  FunctionSample payload;
  std::size_t index = 0;  // 0-based center index
  double distance = 0.0;  // |w - a_index|
  Vec raw_output;         // w, before projection
};

BorelPrediction predict_borel(const BorelNet& bnet, const FunctionSample& x);

struct VoronoiReport {
  bool ok = true;
  std::optional<std::size_t> violating_sample;
  std::string detail;
};

// Pointwise check of the preimage structure of the projection: the chosen
// index k satisfies D_k <= min_u D_u, and additionally D_k < min_{u<k} D_u
// when k is not the first center.
VoronoiReport voronoi_preimage_check(const Codebook& cb, const std::vector<Vec>& samples);

}  // namespace qpnet
