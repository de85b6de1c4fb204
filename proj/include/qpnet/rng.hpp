#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qpnet {

// Seed mixing and scalar draws are pinned to explicit formulas on top of
// std::mt19937_64 so that identical seeds give identical streams; the
// std::*_distribution adapters are implementation-defined and avoided.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-record / per-stream seed from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x633d5d38cf01f7f1ULL));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Standard normal via Box-Muller (two draws per call, no cached state).
inline double normal(std::mt19937_64& g) {
  double u1 = 1.0 - uniform01(g);  // (0, 1]
  double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace qpnet
