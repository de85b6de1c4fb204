#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qpnet/quantize.hpp"

namespace qpnet {

struct CheckResult {
  std::string name;
  bool pass = true;
  bool informational = false;  // reported but not counted against the suite
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass && !c.informational) return false;
    return true;
  }
};

// Suites: embed, activation, net, quantize, realize, train, uap, all.
VerifyReport run_verify(const std::string& suite, std::uint64_t seed);

using Projector = std::function<std::size_t(const Codebook&, const Vec&)>;

// Individual checks, parameterized by workload so the acceptance suite can
// run them at its own scale.
namespace checks {

CheckResult cube_containment(std::uint64_t seed, std::size_t inputs_per_encoder);
CheckResult pseudometric_monotone(std::uint64_t seed, std::size_t pairs, double tol);
CheckResult convexity_preservation(std::uint64_t seed, std::size_t triples, double tol);

CheckResult gate_limits();
CheckResult gate_lipschitz_certificate();
CheckResult activation_bounded(std::uint64_t seed, std::size_t trials);
CheckResult activation_empirical_lipschitz(std::uint64_t seed, std::size_t pairs);
CheckResult separating_property(std::uint64_t seed, int trials, double lambda, double tol);

CheckResult lambda_consistency(std::uint64_t seed, std::size_t cases);
CheckResult net_bounded(std::uint64_t seed, std::size_t cases);
CheckResult net_input_lipschitz(std::uint64_t seed, std::size_t cases);
CheckResult projection_error_decay(std::uint64_t seed, std::size_t ref_truncation,
                                   std::size_t inputs, double threshold);

CheckResult metric_projection_oracle(std::uint64_t seed, std::size_t queries_per_size,
                                     std::size_t max_size, const Projector& projector);
CheckResult quantize_error_decomposition(std::uint64_t seed, std::size_t points);
CheckResult codebook_covering(std::uint64_t seed, std::size_t builds);

CheckResult ext_norms(std::uint64_t seed, std::size_t cases, double tol);
CheckResult replication_identities(std::uint64_t seed, std::size_t cases,
                                   std::size_t max_truncation);
CheckResult realization_stability(std::uint64_t seed, std::size_t perturbations,
                                  std::size_t inputs);
CheckResult parameter_continuity(std::uint64_t seed);

CheckResult gradient_oracle(std::uint64_t seed, std::size_t pairs, double step, double tol);
CheckResult train_determinism(std::uint64_t seed);
CheckResult lr_zero_identity(std::uint64_t seed);
CheckResult descent_sanity(std::uint64_t seed);  // informational

// Desk-scale demonstrations.
CheckResult uap_scalar_demo(std::uint64_t seed, std::size_t steps, double loss_threshold);
CheckResult pipeline_bound(std::uint64_t seed, std::size_t target_grid,
                           std::size_t truncation, double epsilon, std::size_t train_steps);

}  // namespace checks

}  // namespace qpnet
