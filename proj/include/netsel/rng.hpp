#pragma once

// Seeded random streams. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the distribution helpers below are written out so that
// draws do not depend on the standard library's distribution implementations.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace netsel {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream from a master seed and a key tuple.
inline Rng make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> key) {
  std::uint64_t h = splitmix64(master_seed);
  for (auto part : key) h = splitmix64(h ^ splitmix64(part + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

/// FNV-1a; used to key streams by model name.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // rejection of the biased tail
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

/// k distinct indices from [0, n), returned in ascending order. Requires k <= n.
std::vector<std::uint32_t> sample_indices(Rng& rng, std::uint32_t n, std::uint32_t k);

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace netsel
