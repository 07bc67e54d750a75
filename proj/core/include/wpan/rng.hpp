#pragma once

#include <cstdint>
#include <random>

namespace wpan {

/// Purpose tags for RNG substreams. Each (seed, purpose) pair yields an
/// independent stream, so changing one impairment leaves the other draws
/// untouched.
enum class RngPurpose : std::uint64_t {
  Backoff = 1,
  ChipFlip = 2,
  SampleNoise = 3,
  SeqInit = 4,
  Payload = 5,
};

/// Deterministic, platform-independent generator. mt19937_64 output is
/// fully specified by the C++ standard; the bounded/real draws below avoid
/// std::uniform_*_distribution, whose mapping is implementation-defined.
class Rng {
 public:
  Rng(std::uint64_t seed, RngPurpose purpose)
      : engine_(mix(seed, static_cast<std::uint64_t>(purpose))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound], inclusive. bound may be 0.
  std::uint64_t uniform(std::uint64_t bound) {
    if (bound == std::uint64_t(-1)) return next_u64();
    std::uint64_t range = bound + 1;
    std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % range + 1) % range;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v > limit);
    return v % range;
  }

  /// Uniform double in [0, 1).
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (deterministic, no cached spare).
  double normal();

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t purpose);
  std::mt19937_64 engine_;
};

}  // namespace wpan
