#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "qpnet/linalg.hpp"

namespace qpnet {

// ---------------------------------------------------------------------------
// Separating activations sigma : V -> V in finite truncation.
// The rank-one family sigma(w) = beta(psi . w) u_plus realizes the
// directional-limit (separating) property with u_0 = u_- = 0.
// ---------------------------------------------------------------------------

enum class GateKind { ReluTanh, GatedTanh };

// beta(0) = 0, beta -> 1 at +inf, beta -> 0 at -inf, |beta| <= 1.
double gate_value(GateKind kind, double xi);
double gate_derivative(GateKind kind, double xi);  // subgradient 0 at the ReluTanh kink

// 1.0 for ReluTanh; 1.25 for GatedTanh (numerically certified upper bound).
double gate_lipschitz(GateKind kind);

struct RankOneActivation {
  Vec psi;     // direction functional, |psi| > 0
  Vec u_plus;  // range vector, |u_plus| > 0
  GateKind gate = GateKind::GatedTanh;
};

// sigma(w)_k = beta(w_k). No separating-property guarantee; experimental.
struct ComponentwiseActivation {
  GateKind gate = GateKind::GatedTanh;
};

using ActivationSpec = std::variant<RankOneActivation, ComponentwiseActivation>;

// Intrinsic dimension; 0 for componentwise (matches any input length).
std::size_t activation_dim(const ActivationSpec& act);
GateKind activation_gate(const ActivationSpec& act);
void validate_activation(const ActivationSpec& act);

Vec activate(const ActivationSpec& act, const Vec& w);

// |psi| * |u_plus| * Lip(beta) for rank-one; Lip(beta) componentwise.
double lipschitz_bound(const ActivationSpec& act);

// Rank-one helper: the scalar pre-activation psi . w.
double rank_one_preactivation(const RankOneActivation& act, const Vec& w);

struct SeparationReport {
  bool pass = true;
  int positive_trials = 0;
  int negative_trials = 0;
  int kernel_trials = 0;
  double worst_positive = 0.0;  // max |sigma(lambda x) - u_plus| over psi.x > 0.1
  double worst_negative = 0.0;  // max |sigma(lambda x)| over psi.x < -0.1
  double worst_kernel = 0.0;
  std::optional<Vec> first_violation;
  std::string detail;
};

// Samples random directions and checks the three directional limits.
// Kernel directions are built as psi_j e_i - psi_i e_j so the dot product
// cancels exactly in floating point; under ReluTanh the negative and kernel
// sides are then required to vanish exactly, the positive side within tol.
SeparationReport check_separating(const ActivationSpec& act, double lambda, int trials,
                                  double tol, std::uint64_t seed);

// Uniform direction psi = u_plus = (1,...,1)/sqrt(n); the stock choice for
// training, spreading gradient signal across all coordinates.
RankOneActivation default_rank_one(std::size_t n, GateKind gate);

// Restriction of the activation's internal vectors to the leading n coords.
ActivationSpec truncate_activation(const ActivationSpec& act, std::size_t n);

// Zero-pad the internal vectors to dimension m.
ActivationSpec pad_activation(const ActivationSpec& act, std::size_t m);

}  // namespace qpnet
