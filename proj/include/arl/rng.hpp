#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace arl {

// Seeded random stream. Streams are never shared between workers; derive a
// fresh one per role (and per trajectory index when fanning out).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Stream for a named role under a master seed. The role name is hashed so
  // "env" and "behavior" streams of the same run are independent.
  static Rng derive(std::uint64_t seed, std::string_view role);

  // Child stream number `index` of this stream's seed; does not advance *this.
  Rng split(std::uint64_t index) const;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  int uniform_int(int n) { return static_cast<int>(uniform() * n); }

  // Index drawn from a probability row by inverse CDF.
  int categorical(std::span<const double> probs);

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_role(std::string_view role);

}  // namespace arl
