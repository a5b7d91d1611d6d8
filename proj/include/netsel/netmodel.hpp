#pragma once

// Candidate edge sets: similarity-derived (KNN, threshold) and explicit edge lists.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "netsel/data.hpp"

namespace netsel {

/// Out-adjacency lists. Each list is sorted, duplicate-free and free of self-loops.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t n_nodes, bool directed = true) : adj_(n_nodes), directed_(directed) {}

  /// Sorts each list and validates the invariants; throws InvalidArgument on violation.
  static EdgeSet from_adjacency(std::vector<std::vector<NodeId>> adj, bool directed = true);

  std::size_t n_nodes() const noexcept { return adj_.size(); }
  bool directed() const noexcept { return directed_; }
  std::span<const NodeId> out(NodeId i) const { return adj_[i]; }
  std::size_t out_degree(NodeId i) const { return adj_[i].size(); }
  std::size_t edge_count() const noexcept;
  bool has_edge(NodeId from, NodeId to) const;
  std::vector<std::size_t> out_degrees() const;
  std::vector<std::size_t> in_degrees() const;
  const std::vector<std::vector<NodeId>>& adjacency() const noexcept { return adj_; }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<std::vector<NodeId>> adj_;
  bool directed_ = true;
};

/// Sum of element-wise minima of two sparse rows (unnormalized intersection).
double d_int(SparseRow a, SparseRow b);

struct SimilarityParams {
  std::size_t target_edges = 0;  // rho
};

/// Inverted item index that scores one node against every co-active node with d_int.
/// Scores accumulate in ascending item order, so they equal d_int bit for bit.
class SimilarityIndex {
 public:
  explicit SimilarityIndex(const AttributeMatrix& matrix);

  /// Fills scores[j] for every j sharing an item with i (j != i) and lists those j in
  /// `touched` (unordered). `scores` must be sized n_nodes and zero on entry; callers
  /// reset the touched entries afterwards.
  void score(NodeId i, std::vector<double>& scores, std::vector<NodeId>& touched) const;

  const AttributeMatrix& matrix() const noexcept { return *matrix_; }

 private:
  const AttributeMatrix* matrix_;
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<NodeId, double>> postings_;
};

/// Directed KNN graph: each node points at its floor(rho/|V|) most similar nodes.
/// Ties go to the smaller node id.
EdgeSet build_knn(const AttributeMatrix& matrix, SimilarityParams params);

/// Threshold graph: the rho most similar unordered pairs, each stored as two directed
/// edges. Ties go to the lexicographically smaller (i, j) pair.
EdgeSet build_threshold(const AttributeMatrix& matrix, SimilarityParams params);

struct EdgeFile {
  EdgeSet edges;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Reads whitespace-separated "src dst" lines; '#' starts a comment line.
EdgeFile parse_edges(std::istream& in, std::size_t n_nodes);
EdgeFile load_edges(const std::filesystem::path& path, std::size_t n_nodes);
void write_edges(std::ostream& out, const EdgeSet& edges);

}  // namespace netsel
