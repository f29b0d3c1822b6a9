#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tlearn {

/// Seeded random stream. Equal seeds give bit-identical sequences on every
/// platform: only the raw 64-bit engine output is used, never the
/// implementation-defined std distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Per-trial stream derived from a master seed. Distinct trial indices map
  /// to decorrelated seeds through a splitmix64 mix.
  static RngStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index);
  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tlearn
