#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace audiobook {

// Portable deterministic random source. The standard distributions are
// implementation-defined, so draws are derived from the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Box-Muller; the second variate is cached.
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ull);

// Seed for a named sub-stream of a project seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace audiobook
