#pragma once

#include <cstdint>
#include <vector>

#include "stickslip/friction.hpp"
#include "stickslip/random.hpp"

namespace testing_helpers {

// Piecewise-linear input with random velocities, 100 Hz samples.
inline std::vector<stickslip::InputSample> random_walk_trace(std::uint64_t seed, int samples = 500,
                                                             double max_speed = 300.0) {
  stickslip::Rng rng(seed);
  std::vector<stickslip::InputSample> out;
  double q = 0.0;
  double v = 0.0;
  for (int i = 0; i < samples; ++i) {
    if (i % 25 == 0) v = (2.0 * rng.uniform() - 1.0) * max_speed;
    if (i % 100 == 50) v = 0.0;
    out.push_back({i / 100.0, q, true});
    q += v / 100.0;
  }
  return out;
}

}  // namespace testing_helpers
