#pragma once

#include <cstdint>
#include <string_view>

namespace compop::numerics {

// Counter-based SplitMix64: draw k of stream `seed` is
//   mix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
// with the standard SplitMix64 finalizer, so any implementation can
// reproduce draw k without replaying the first k-1.
class CounterRng {
 public:
  static constexpr std::string_view algorithm = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t at(std::uint64_t counter) const;
  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Box-Muller from two consecutive uniforms.
  double normal();
  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace compop::numerics
