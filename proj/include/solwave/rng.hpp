#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "solwave/field.hpp"

namespace solwave {

// Deterministic noise source for demo scenarios and fit calibration.
// mt19937_64 output is fully specified by the standard; the mappings below
// avoid std::*_distribution, whose results vary across implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [-amplitude, amplitude).
  double uniform_symmetric(double amplitude) { return amplitude * (2.0 * uniform() - 1.0); }

  // Standard normal via Box-Muller. Not cached, so the draw sequence is
  // a pure function of the call count.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace solwave
