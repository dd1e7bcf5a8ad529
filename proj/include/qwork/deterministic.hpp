#pragma once

#include "qwork/propagation.hpp"

#include <cstdint>

// Fixed-sequence pseudo-random vectors for self-checks. Nothing in the tool
// draws entropy; identical inputs always replay identical sequences.

namespace qwork {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

// Linear ramp plus bounded fixed-sequence noise on the rate.
inline ControlProtocol noisy_ramp_protocol(const TimeGrid& grid, double u0, double u_target,
                                           double v_noise, std::uint64_t seed) {
  ControlProtocol protocol;
  protocol.grid = grid;
  protocol.u0 = u0;
  protocol.u_target = u_target;
  protocol.v.resize(static_cast<std::size_t>(grid.steps));
  SplitMix64 rng(seed);
  const double ramp = (u_target - u0) / grid.horizon;
  for (auto& vk : protocol.v) vk = ramp + rng.uniform(-v_noise, v_noise);
  return protocol;
}

}  // namespace qwork
