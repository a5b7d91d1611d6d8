#pragma once

// Random-forest task models: trained on a query sample, applied to the seed node, and
// serialized for costing.

#include <cstdint>
#include <span>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/msgpack.hpp"
#include "netsel/rng.hpp"

namespace netsel {

/// Training rows in sample-local feature coordinates.
struct TrainSet {
  /// Rows of (local feature index, value), sorted by index, zeros omitted.
  std::vector<std::vector<Entry>> features;
  std::vector<std::uint8_t> targets;
  /// Local feature index -> item id; ascending, covers every non-zero item of the sample.
  std::vector<ItemId> feature_map;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t n_features() const noexcept { return feature_map.size(); }

  static TrainSet from_sample(const AttributeMatrix& matrix, std::span<const NodeId> members,
                              std::span<const std::uint8_t> label_mask);
  /// Dense rows; column c becomes item c.
  static TrainSet from_dense(const std::vector<std::vector<double>>& rows,
                             std::vector<std::uint8_t> targets);
};

struct ForestHyper {
  std::size_t n_trees = 10;
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  /// Features tried per split; 0 means ceil(sqrt(d)).
  std::size_t feature_subsample = 0;

  friend bool operator==(const ForestHyper&, const ForestHyper&) = default;
};

/// Array-encoded binary tree. Node 0 is the root. Leaves have left = right = feature = -1
/// and threshold -1; internal nodes have value -1. A row goes left when its value is
/// <= threshold.
struct DecisionTree {
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;
  std::vector<std::int32_t> value;

  std::size_t n_nodes() const noexcept { return left.size(); }
  bool is_leaf(std::size_t n) const { return left[n] < 0; }
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TrainedForest {
  std::vector<DecisionTree> trees;
  /// Local feature index -> item id, reduced to the items some split uses.
  std::vector<ItemId> feature_map;

  std::size_t n_trees() const noexcept { return trees.size(); }
  friend bool operator==(const TrainedForest&, const TrainedForest&) = default;
};

/// Bootstrap-resampled Gini trees. Each node draws its candidate features from its own
/// stream, so a shallower forest is the deeper one cut at the depth limit.
TrainedForest train_forest(const TrainSet& data, const ForestHyper& hyper, Rng& rng);

/// Leaf value reached by a row given as a local-feature lookup.
int tree_predict(const DecisionTree& tree, const TrainedForest& forest, SparseRow row);

/// Majority vote; ties predict 0. Items outside the feature map read as 0.
int predict(const TrainedForest& forest, SparseRow row);
/// Number of trees voting 1.
std::size_t positive_votes(const TrainedForest& forest, SparseRow row);

/// [feature_map, [[left, right, feature, threshold, value], ...]]
mdl::Value forest_repr(const TrainedForest& forest);
/// Inverse of forest_repr; throws InvalidArgument on a malformed object.
TrainedForest forest_from_repr(const mdl::Value& repr);

/// Structural checks: equal list lengths, children in range and after their parent,
/// leaves consistent, feature indices inside the feature map.
void validate(const TrainedForest& forest);

}  // namespace netsel
