#pragma once

#include <array>
#include <cstdint>

namespace qkpse {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams
// are bit-identical across standard library versions; samplers receive
// an explicit generator and shard generators are derived from
// (seed, shard index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng shard(std::uint64_t seed, std::uint64_t shard_index);

  std::uint64_t next();

  // uniform in [0, 1)
  double uniform();

  // standard normal via Box-Muller (one cached value)
  double normal();

  // true with probability p
  bool bernoulli(double p);

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace qkpse
