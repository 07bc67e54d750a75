#include "wpan/rng.hpp"

#include <cmath>
#include <numbers>

namespace wpan {

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t purpose) {
  // splitmix64 finalizer over seed ^ rotated purpose
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (purpose + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::normal() {
  double u1;
  do {
    u1 = uniform_real();
  } while (u1 <= 0.0);
  double u2 = uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace wpan
