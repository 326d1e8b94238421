#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "policybound/normal.hpp"

namespace policybound {

// Deterministic random source. std::mt19937_64 has a fully specified
// output sequence, and every distribution below is implemented here by
// inverse-CDF or explicit transform, so draws are bit-identical across
// platforms and standard libraries. (The std:: distribution classes are
// implementation-defined and must not be used for anything that feeds a
// frozen expected value.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1): 53 random bits offset by half an
  // ulp, so log() and norm_quantile() are always safe.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() { return norm_quantile(uniform()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exponential with the given rate (mean 1 / rate).
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer, used to derive well-separated child seeds from
// (base, index) pairs without coupling their streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace policybound
