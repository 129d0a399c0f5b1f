#pragma once

#include <cstdint>
#include <string_view>

namespace lipgan {

/// Counter-based 64-bit generator.
///
/// The i-th output of a stream with key k is splitmix64_mix(k + (i + 1) * 0x9E3779B97F4A7C15),
/// where splitmix64_mix is the SplitMix64 finalizer
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
/// Because every output is a pure function of (key, counter), streams can be
/// replayed or reproduced in another language from the key alone.
///
/// Doubles in [0, 1) take the top 53 bits. Normals use Box-Muller on two
/// consecutive uniforms; both outputs of a pair are used in order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Stream for one component of a run ("data", "init", "noise", "eval", ...).
  /// key = mix(mix(seed) ^ fnv1a64(name)).
  static CounterRng stream(std::uint64_t seed, std::string_view name) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace lipgan
