#pragma once

#include <cstdint>
#include <random>

namespace rssdgeo {

/// Seedable, splittable pseudo-random stream.
///
/// A stream is identified by a 64-bit key; split(id) derives an independent
/// child key by SplitMix64 mixing, so substreams depend only on the path of
/// ids from the root seed and never on draw order elsewhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::uint64_t stream_id) const;

  std::uint64_t key() const noexcept { return key_; }

  double normal(double mean = 0.0, double stddev = 1.0);
  double uniform(double lo = 0.0, double hi = 1.0);

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace rssdgeo
