#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hmlab {

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_exact(int v) {
  if (!is_power_of_two(v)) throw std::invalid_argument("log2_exact: " + std::to_string(v) + " is not a power of two");
  return std::countr_zero(static_cast<unsigned>(v));
}

// Inner product mod 2 of two basis labels viewed as bit vectors.
inline int parity_dot(unsigned u, unsigned v) { return std::popcount(u & v) & 1; }

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent child stream for parallel/per-task use.
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

// Uniform integer in [0, n). Rejection sampling keeps the result identical
// across standard library implementations, unlike uniform_int_distribution.
inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded_u64: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int random_bit(std::mt19937_64& rng) { return static_cast<int>(rng() >> 63); }

}  // namespace hmlab
