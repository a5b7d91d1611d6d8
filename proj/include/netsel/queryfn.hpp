#pragma once

// Bounded network query functions: given a seed node i and a size k, return k unique
// nodes other than i, drawn from one of seven representations.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/netmodel.hpp"
#include "netsel/rng.hpp"

namespace netsel {

enum class QueryKind { bfs, cluster, degree_top, activity_top, degree_net, activity_net, random };

inline constexpr QueryKind kAllQueryKinds[] = {
    QueryKind::bfs,        QueryKind::cluster,      QueryKind::degree_top, QueryKind::activity_top,
    QueryKind::degree_net, QueryKind::activity_net, QueryKind::random};

std::string_view to_string(QueryKind kind);
QueryKind parse_query_kind(std::string_view name);
/// True for kinds whose representation is derived from an edge set.
bool needs_network(QueryKind kind);

/// Top-ell node ranking, best first.
struct RankedList {
  std::vector<NodeId> ids;
  std::size_t ell = 0;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Disjoint communities. Nodes outside every community (only after pruning) map to kNone.
class CommunityMap {
 public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  CommunityMap() = default;
  /// Communities are renumbered densely in order of their smallest member.
  static CommunityMap from_assignment(std::span<const std::uint32_t> assignment);
  static CommunityMap from_members(std::size_t n_nodes, std::vector<std::vector<NodeId>> members);

  std::size_t n_nodes() const noexcept { return assignment_.size(); }
  std::size_t n_communities() const noexcept { return members_.size(); }
  std::uint32_t community_of(NodeId i) const { return assignment_[i]; }
  std::span<const NodeId> members(std::uint32_t c) const { return members_[c]; }
  const std::vector<std::vector<NodeId>>& all_members() const noexcept { return members_; }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }

  friend bool operator==(const CommunityMap&, const CommunityMap&) = default;

 private:
  std::vector<std::uint32_t> assignment_;
  std::vector<std::vector<NodeId>> members_;
};

/// Constrained KNN graph whose targets all lie in a top-ell pool.
struct AdHocNet {
  std::size_t n_nodes = 0;
  std::vector<NodeId> pool;              // ranked pool the targets come from
  std::vector<std::vector<NodeId>> out;  // sorted out-lists, m per node
  std::size_t m = 0;

  friend bool operator==(const AdHocNet&, const AdHocNet&) = default;
};

/// Uniform pool for the random query function.
struct NodePool {
  std::size_t n_nodes = 0;
  std::vector<NodeId> ids;  // ascending

  friend bool operator==(const NodePool&, const NodePool&) = default;
};

using QueryPayload = std::variant<EdgeSet, CommunityMap, RankedList, AdHocNet, NodePool>;

struct QueryRep {
  QueryKind kind = QueryKind::random;
  QueryPayload payload;
  std::size_t ell = 0;  // ranked and ad-hoc kinds
  std::size_t m = 0;    // ad-hoc kinds

  /// Node universe size; 0 for ranked lists, which do not record it.
  std::size_t n_nodes() const;
  friend bool operator==(const QueryRep&, const QueryRep&) = default;
};

QueryRep make_bfs_rep(EdgeSet edges);
QueryRep make_cluster_rep(CommunityMap communities);
QueryRep make_top_rep(QueryKind kind, RankedList ranked);
QueryRep make_net_rep(QueryKind kind, AdHocNet net);
QueryRep make_random_rep(std::size_t n_nodes);

/// Checks that the payload matches the kind and satisfies its shape invariants.
void validate(const QueryRep& rep);

/// Set of nodes touched by any query during an evaluation.
class ReachLog {
 public:
  ReachLog() = default;
  explicit ReachLog(std::size_t n_nodes) : touched_(n_nodes, 0) {}

  void touch(NodeId i) {
    if (!touched_[i]) {
      touched_[i] = 1;
      ++count_;
    }
  }
  bool contains(NodeId i) const { return touched_[i] != 0; }
  std::size_t size() const noexcept { return count_; }
  std::size_t n_nodes() const noexcept { return touched_.size(); }
  void merge(const ReachLog& other);
  std::vector<NodeId> members() const;

  static ReachLog full(std::size_t n_nodes);

 private:
  std::vector<std::uint8_t> touched_;
  std::size_t count_ = 0;
};

struct QuerySample {
  NodeId seed = 0;
  std::size_t k = 0;
  std::vector<NodeId> members;  // ascending, excludes seed
};

/// Draws one bounded query sample and records the seed and members in `log`.
/// Throws InsufficientNodes when fewer than k eligible nodes exist.
QuerySample query(const QueryRep& rep, NodeId i, std::size_t k, Rng& rng, ReachLog& log);

/// As query(), but returns nullopt instead of throwing InsufficientNodes.
std::optional<QuerySample> try_query(const QueryRep& rep, NodeId i, std::size_t k, Rng& rng,
                                     ReachLog& log);

/// Label propagation over the symmetrized edge set. Nodes are visited in a seeded random
/// order each sweep; ties between the most frequent neighbor labels are broken by the
/// seeded stream, keeping the current label when it is among them. At most 20 sweeps.
CommunityMap detect_communities(const EdgeSet& edges, std::uint64_t seed);

/// Nodes by descending non-zero attribute count, ties by ascending id, truncated to ell.
RankedList rank_by_activity(const AttributeMatrix& matrix, std::size_t ell);
/// Nodes by descending in+out degree, ties by ascending id, truncated to ell.
RankedList rank_by_degree(const EdgeSet& edges, std::size_t ell);

/// For every node, out-edges to its m most d_int-similar pool members (excluding itself).
AdHocNet build_adhoc_net(const RankedList& ranked, const AttributeMatrix& matrix, std::size_t m);

/// Restricts a representation to the reach-set: graphs become induced subgraphs and
/// lists lose their untouched elements.
QueryRep prune_to_reach(const QueryRep& rep, const ReachLog& log);

/// Number of stored ids in the payload (list elements or edges).
std::size_t payload_size(const QueryRep& rep);

}  // namespace netsel
