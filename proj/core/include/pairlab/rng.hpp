#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pairlab {

// Advances a splitmix64 state and returns the next output word.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Output of one splitmix64 advance starting from state x (pure).
std::uint64_t splitmix64_mix(std::uint64_t x);

std::uint64_t fnv1a64(std::string_view s);

// Named substream label. Identical (master_seed, labels) always derive the
// same seed, independent of process, platform, or evaluation order.
struct StreamLabel {
  std::string name;
  std::uint64_t index = 0;
};

struct SeedContext {
  std::uint64_t master_seed = 0;
  std::vector<StreamLabel> labels;
};

// Iterated splitmix64 mixing of the master seed with a stable hash of each
// label in order: s <- splitmix64_mix(s ^ hash(name, index)).
std::uint64_t derive_seed(const SeedContext& ctx);
std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<StreamLabel> labels);

// xoshiro256** with splitmix64 seeding. Algorithm fixed so streams replay
// across implementations; distribution transforms below are likewise pinned
// (no std::*_distribution, which is implementation-defined).
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed);

  std::uint64_t next();

  // [0, 1), 53-bit resolution.
  double uniform01();

  // Unbiased draw from {0, ..., bound-1} by rejection.
  std::uint64_t below(std::uint64_t bound);

  // +1 or -1, fair.
  double rademacher();

  // Standard normal via Box-Muller; consumes exactly two words.
  double normal();

  // sigma * z with z standard normal conditioned on |z| <= cut.
  double truncated_normal(double sigma, double cut);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace pairlab
