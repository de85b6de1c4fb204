#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpnet/function_sample.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Synthetic functional-data generators and target attachment. The Fourier
// family with 1/k^2 coefficient decay is uniformly bounded and
// equicontinuous, so every generated set lives inside a genuinely compact
// input class.
// ---------------------------------------------------------------------------

enum class TargetKind { None, Integral, PointEval, SquareIntegral, SquareOperator };

struct TargetSpec {
  TargetKind kind = TargetKind::None;
  double t0 = 0.0;  // PointEval only
};

struct Record {
  std::string id;
  FunctionSample x;
  std::optional<double> scalar_target;
  std::optional<Vec> vector_target;
  std::optional<FunctionSample> function_target;
};

struct DatasetMeta {
  std::string family = "fourier";
  std::size_t modes = 0;
  double bound = 1.0;
  std::size_t grid = 2;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string split;
  std::string target = "none";
};

struct Dataset {
  std::vector<Record> records;
  DatasetMeta meta;
};

struct FamilySpec {
  std::size_t modes = 3;   // m >= 0
  double bound = 1.0;      // c > 0
  std::size_t grid = 101;  // G >= 2
  std::size_t count = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// x(t) = a0 + sum_{k=1..m} (a_k cos 2 pi k t + b_k sin 2 pi k t) on a uniform
// grid over [0,1]; a0 ~ U[-c,c], a_k, b_k ~ U[-c/k^2, c/k^2], drawn from a
// per-record seed derived from the master seed.
Dataset gen_fourier_family(const FamilySpec& spec);

void attach_target(Dataset& ds, const TargetSpec& target);

std::string target_kind_name(TargetKind kind);
TargetKind target_kind_from_name(const std::string& name);

}  // namespace qpnet
