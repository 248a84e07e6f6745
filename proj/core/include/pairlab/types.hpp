#pragma once

#include <cstdint>
#include <vector>

#include "pairlab/vec.hpp"

namespace pairlab {

// One observation z = (x, y).
struct Sample {
  Vec x;
  double y = 0.0;
};

// Ordered i.i.d. draw of n samples plus the seed that produced it.
struct Dataset {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(samples.size()); }
};

}  // namespace pairlab
