#pragma once

// Random fixtures shared by the unit tests.

#include <filesystem>
#include <string>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/netmodel.hpp"
#include "netsel/rng.hpp"

namespace netsel::fixture {

/// Each (node, item) cell is non-zero with probability `density`, values in 1..max_value.
inline AttributeMatrix random_matrix(Rng& rng, std::size_t n, std::size_t items, double density,
                                     int max_value = 5) {
  std::vector<Triplet> t;
  for (NodeId i = 0; i < n; ++i)
    for (ItemId it = 0; it < items; ++it)
      if (bernoulli(rng, density))
        t.push_back({i, it, static_cast<double>(1 + uniform_below(rng, static_cast<std::uint64_t>(max_value)))});
  return AttributeMatrix::from_triplets(n, items, std::move(t));
}

/// Every ordered pair (i, j), i != j, is an edge with probability p.
inline EdgeSet random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j && bernoulli(rng, p)) adj[i].push_back(j);
  return EdgeSet::from_adjacency(std::move(adj));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("netsel_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace netsel::fixture
