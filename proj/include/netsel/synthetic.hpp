#pragma once

// Planted-partition synthetic datasets for desk-scale experiments.
//
// Nodes are split into balanced communities. Each community prefers one contiguous
// block of items; per-node activity levels follow a log-normal with spread
// `activity_skew`. A directed ground-truth graph links nodes mostly inside their own
// community. Labelset l is aligned with community l mod n_communities: members are
// positive with probability `label_community_alignment`, everyone else with
// probability (1 - alignment) / (n_communities - 1).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/netmodel.hpp"

namespace netsel {

struct SyntheticConfig {
  std::size_t n_nodes = 500;
  std::size_t n_items = 1000;
  std::size_t n_communities = 4;
  double intra_affinity = 0.9;  // share of graph edges inside the community
  double activity_skew = 0.5;   // log-normal sigma of per-node activity; 0 = uniform
  double label_community_alignment = 0.9;
  std::uint64_t seed = 1;

  std::size_t n_labelsets = 2;
  std::size_t mean_activity = 20;  // distinct items per node per partition
  std::size_t out_degree = 10;     // ground-truth graph out-degree
  double item_affinity = 0.8;      // share of a node's items drawn from its community block
  double mean_value = 4.0;         // mean activity value (counts start at 1)

  void validate() const;
};

struct SyntheticData {
  std::array<AttributeMatrix, 3> partitions;  // validation, training, testing
  LabelCatalog labels;
  std::vector<std::uint32_t> communities;
  EdgeSet graph;
};

/// Pure function of the config: equal configs give identical data.
SyntheticData generate_synthetic(const SyntheticConfig& cfg);

SyntheticConfig parse_synthetic_config(const std::string& json_text);

}  // namespace netsel
