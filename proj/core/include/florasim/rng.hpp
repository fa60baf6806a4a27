#pragma once

#include <cstdint>
#include <random>

namespace florasim {

// Deterministic random stream. The gaussian is a fixed Box-Muller transform on
// top of mt19937_64 so that draws do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Gaussian with mean 0; consumes exactly two uniforms.
  double gaussian(double sigma);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace florasim
