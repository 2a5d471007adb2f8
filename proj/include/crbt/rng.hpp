#pragma once

#include <cmath>
#include <cstdint>

namespace crbt {

// Counter-based deterministic random numbers: stream value i of the stream
// keyed by `seed` is a pure function of (seed, i), so draws can be computed
// in any order (or in parallel) and still reproduce bit-identically.

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed ^ splitmix64(i + 0x632be59bd9b4e019ull));
}

// uniform in the open interval (0,1); never returns 0, safe under log()
inline double counter_uniform(std::uint64_t seed, std::uint64_t i) {
  return static_cast<double>((counter_word(seed, i) >> 11) + 0.5) *
         0x1.0p-53;
}

// standard normal draw via the Box-Muller cosine branch
inline double counter_gaussian(std::uint64_t seed, std::uint64_t i) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double u1 = counter_uniform(seed, 2 * i);
  const double u2 = counter_uniform(seed, 2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace crbt
