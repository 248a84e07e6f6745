#include "pairlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pairlab {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t splitmix64_mix(std::uint64_t x) { return splitmix64_next(x); }

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::uint64_t label_hash(const StreamLabel& label) {
  return splitmix64_mix(fnv1a64(label.name) ^ (label.index * 0x9E3779B97F4A7C15ull + label.index));
}

}  // namespace

std::uint64_t derive_seed(const SeedContext& ctx) {
  std::uint64_t s = ctx.master_seed;
  for (const StreamLabel& label : ctx.labels) s = splitmix64_mix(s ^ label_hash(label));
  return s;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<StreamLabel> labels) {
  std::uint64_t s = master_seed;
  for (const StreamLabel& label : labels) s = splitmix64_mix(s ^ label_hash(label));
  return s;
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64_next(sm);
  if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t Xoshiro256ss::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256ss::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Xoshiro256ss::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double Xoshiro256ss::rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

double Xoshiro256ss::normal() {
  // u1 in (0, 1], u2 in [0, 1).
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Xoshiro256ss::truncated_normal(double sigma, double cut) {
  if (sigma == 0.0) return 0.0;
  for (;;) {
    const double z = normal();
    if (std::abs(z) <= cut) return sigma * z;
  }
}

}  // namespace pairlab
