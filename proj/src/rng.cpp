#include "netsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace netsel {

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::vector<std::uint32_t> sample_indices(Rng& rng, std::uint32_t n, std::uint32_t k) {
  std::vector<std::uint32_t> out;
  if (k == 0) return out;
  out.reserve(k);
  if (static_cast<std::uint64_t>(k) * 4 >= n) {
    // dense case: partial Fisher-Yates
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::uint32_t i = 0; i < k; ++i) {
      auto j = i + static_cast<std::uint32_t>(uniform_below(rng, n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  } else {
    // Floyd's algorithm
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(k * 2);
    for (std::uint32_t j = n - k; j < n; ++j) {
      auto t = static_cast<std::uint32_t>(uniform_below(rng, static_cast<std::uint64_t>(j) + 1));
      if (!chosen.insert(t).second) {
        chosen.insert(j);
        out.push_back(j);
      } else {
        out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace netsel
