#include "netsel/queryfn.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "netsel/error.hpp"

namespace netsel {

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::bfs: return "bfs";
    case QueryKind::cluster: return "cluster";
    case QueryKind::degree_top: return "degree_top";
    case QueryKind::activity_top: return "activity_top";
    case QueryKind::degree_net: return "degree_net";
    case QueryKind::activity_net: return "activity_net";
    case QueryKind::random: return "random";
  }
  return "unknown";
}

QueryKind parse_query_kind(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  for (QueryKind k : kAllQueryKinds)
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown query kind '" + std::string(name) + "'");
}

bool needs_network(QueryKind kind) {
  return kind == QueryKind::bfs || kind == QueryKind::cluster || kind == QueryKind::degree_top ||
         kind == QueryKind::degree_net;
}

CommunityMap CommunityMap::from_assignment(std::span<const std::uint32_t> assignment) {
  CommunityMap map;
  map.assignment_.assign(assignment.size(), kNone);
  // dense ids in order of first (smallest) member
  std::unordered_map<std::uint32_t, std::uint32_t> ids;
  for (NodeId i = 0; i < assignment.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(assignment[i], static_cast<std::uint32_t>(map.members_.size()));
    if (inserted) map.members_.emplace_back();
    map.assignment_[i] = it->second;
    map.members_[it->second].push_back(i);
  }
  return map;
}

CommunityMap CommunityMap::from_members(std::size_t n_nodes,
                                        std::vector<std::vector<NodeId>> members) {
  CommunityMap map;
  map.assignment_.assign(n_nodes, kNone);
  for (auto& list : members) {
    if (list.empty()) continue;
    std::sort(list.begin(), list.end());
    const auto c = static_cast<std::uint32_t>(map.members_.size());
    for (NodeId i : list) {
      if (i >= n_nodes) throw InvalidArgument("community member out of range");
      if (map.assignment_[i] != kNone) throw InvalidArgument("node in two communities");
      map.assignment_[i] = c;
    }
    map.members_.push_back(std::move(list));
  }
  return map;
}

std::size_t QueryRep::n_nodes() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RankedList>) {
          return 0;
        } else if constexpr (std::is_same_v<T, AdHocNet> || std::is_same_v<T, NodePool>) {
          return p.n_nodes;
        } else {
          return p.n_nodes();
        }
      },
      payload);
}

namespace {

std::size_t payload_index(QueryKind kind) {
  switch (kind) {
    case QueryKind::bfs: return 0;
    case QueryKind::cluster: return 1;
    case QueryKind::degree_top:
    case QueryKind::activity_top: return 2;
    case QueryKind::degree_net:
    case QueryKind::activity_net: return 3;
    case QueryKind::random: return 4;
  }
  return 5;
}

}  // namespace

void validate(const QueryRep& rep) {
  if (rep.payload.index() != payload_index(rep.kind))
    throw InvalidArgument("query rep: payload does not match kind " + std::string(to_string(rep.kind)));
  if (const auto* r = std::get_if<RankedList>(&rep.payload)) {
    if (r->ids.size() > r->ell) throw InvalidArgument("ranked list longer than ell");
  }
  if (const auto* net = std::get_if<AdHocNet>(&rep.payload)) {
    if (net->out.size() != net->n_nodes) throw InvalidArgument("ad-hoc net: out-list count != n_nodes");
  }
}

QueryRep make_bfs_rep(EdgeSet edges) { return {QueryKind::bfs, std::move(edges), 0, 0}; }

QueryRep make_cluster_rep(CommunityMap communities) {
  return {QueryKind::cluster, std::move(communities), 0, 0};
}

QueryRep make_top_rep(QueryKind kind, RankedList ranked) {
  if (kind != QueryKind::degree_top && kind != QueryKind::activity_top)
    throw InvalidArgument("make_top_rep: kind must be degree_top or activity_top");
  const std::size_t ell = ranked.ell;
  return {kind, std::move(ranked), ell, 0};
}

QueryRep make_net_rep(QueryKind kind, AdHocNet net) {
  if (kind != QueryKind::degree_net && kind != QueryKind::activity_net)
    throw InvalidArgument("make_net_rep: kind must be degree_net or activity_net");
  const std::size_t ell = net.pool.size();
  const std::size_t m = net.m;
  return {kind, std::move(net), ell, m};
}

QueryRep make_random_rep(std::size_t n_nodes) {
  NodePool pool{n_nodes, std::vector<NodeId>(n_nodes)};
  std::iota(pool.ids.begin(), pool.ids.end(), NodeId{0});
  return {QueryKind::random, std::move(pool), 0, 0};
}

void ReachLog::merge(const ReachLog& other) {
  if (other.touched_.size() != touched_.size()) throw InvalidArgument("reach log size mismatch");
  for (std::size_t i = 0; i < touched_.size(); ++i)
    if (other.touched_[i]) touch(static_cast<NodeId>(i));
}

std::vector<NodeId> ReachLog::members() const {
  std::vector<NodeId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < touched_.size(); ++i)
    if (touched_[i]) out.push_back(static_cast<NodeId>(i));
  return out;
}

ReachLog ReachLog::full(std::size_t n_nodes) {
  ReachLog log(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) log.touch(static_cast<NodeId>(i));
  return log;
}

namespace {

using Members = std::optional<std::vector<NodeId>>;

// k distinct elements of `pool` other than `exclude`; nullopt when too few
Members draw_excluding(std::span<const NodeId> pool, bool sorted, NodeId exclude, std::size_t k,
                       Rng& rng, std::size_t& available) {
  std::size_t pos = pool.size();
  if (sorted) {
    auto it = std::lower_bound(pool.begin(), pool.end(), exclude);
    if (it != pool.end() && *it == exclude) pos = static_cast<std::size_t>(it - pool.begin());
  } else {
    auto it = std::find(pool.begin(), pool.end(), exclude);
    pos = static_cast<std::size_t>(it - pool.begin());
  }
  const bool found = pos < pool.size();
  available = pool.size() - (found ? 1 : 0);
  if (available < k) return std::nullopt;
  auto idx = sample_indices(rng, static_cast<std::uint32_t>(available), static_cast<std::uint32_t>(k));
  std::vector<NodeId> out;
  out.reserve(k);
  for (auto x : idx) out.push_back(pool[found && x >= pos ? x + 1 : x]);
  std::sort(out.begin(), out.end());
  return out;
}

Members draw_bfs(const EdgeSet& edges, NodeId i, std::size_t k, Rng& rng, std::size_t& available) {
  std::unordered_set<NodeId> visited{i};
  std::vector<NodeId> frontier{i};
  std::vector<NodeId> out;
  out.reserve(k);
  while (true) {
    std::vector<NodeId> next;
    for (NodeId u : frontier)
      for (NodeId v : edges.out(u))
        if (visited.insert(v).second) next.push_back(v);
    if (next.empty()) {
      available = out.size();
      return std::nullopt;
    }
    if (out.size() + next.size() <= k) {
      out.insert(out.end(), next.begin(), next.end());
      if (out.size() == k) break;
      frontier = std::move(next);
      continue;
    }
    // farthest level: uniform subset
    const std::size_t need = k - out.size();
    for (auto x : sample_indices(rng, static_cast<std::uint32_t>(next.size()),
                                 static_cast<std::uint32_t>(need)))
      out.push_back(next[x]);
    break;
  }
  available = out.size();
  std::sort(out.begin(), out.end());
  return out;
}

Members dispatch(const QueryRep& rep, NodeId i, std::size_t k, Rng& rng, std::size_t& available) {
  switch (rep.kind) {
    case QueryKind::bfs:
      return draw_bfs(std::get<EdgeSet>(rep.payload), i, k, rng, available);
    case QueryKind::cluster: {
      const auto& map = std::get<CommunityMap>(rep.payload);
      const auto c = map.community_of(i);
      if (c == CommunityMap::kNone) {
        available = 0;
        return std::nullopt;
      }
      return draw_excluding(map.members(c), true, i, k, rng, available);
    }
    case QueryKind::degree_top:
    case QueryKind::activity_top:
      return draw_excluding(std::get<RankedList>(rep.payload).ids, false, i, k, rng, available);
    case QueryKind::degree_net:
    case QueryKind::activity_net:
      return draw_excluding(std::get<AdHocNet>(rep.payload).out[i], true, i, k, rng, available);
    case QueryKind::random:
      return draw_excluding(std::get<NodePool>(rep.payload).ids, true, i, k, rng, available);
  }
  available = 0;
  return std::nullopt;
}

}  // namespace

std::optional<QuerySample> try_query(const QueryRep& rep, NodeId i, std::size_t k, Rng& rng,
                                     ReachLog& log) {
  if (k == 0) throw InvalidArgument("query: k must be >= 1");
  if (i >= log.n_nodes()) throw InvalidArgument("query: seed node out of range");
  std::size_t available = 0;
  auto members = dispatch(rep, i, k, rng, available);
  if (!members) return std::nullopt;
  log.touch(i);
  for (NodeId j : *members) log.touch(j);
  return QuerySample{i, k, std::move(*members)};
}

QuerySample query(const QueryRep& rep, NodeId i, std::size_t k, Rng& rng, ReachLog& log) {
  if (k == 0) throw InvalidArgument("query: k must be >= 1");
  if (i >= log.n_nodes()) throw InvalidArgument("query: seed node out of range");
  std::size_t available = 0;
  auto members = dispatch(rep, i, k, rng, available);
  if (!members) throw InsufficientNodes(available, k);
  log.touch(i);
  for (NodeId j : *members) log.touch(j);
  return QuerySample{i, k, std::move(*members)};
}

CommunityMap detect_communities(const EdgeSet& edges, std::uint64_t seed) {
  const std::size_t n = edges.n_nodes();
  std::vector<std::vector<NodeId>> nbrs(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : edges.out(u)) {
      nbrs[u].push_back(v);
      nbrs[v].push_back(u);
    }
  for (auto& l : nbrs) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }

  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), 0u);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng = make_stream(seed, {0x1abe1});

  constexpr int kMaxSweeps = 20;
  std::vector<std::uint32_t> seen;
  std::vector<std::uint32_t> best;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    shuffle(order, rng);
    bool changed = false;
    for (NodeId u : order) {
      if (nbrs[u].empty()) continue;
      seen.clear();
      for (NodeId v : nbrs[u]) seen.push_back(labels[v]);
      std::sort(seen.begin(), seen.end());
      best.clear();
      std::size_t best_count = 0;
      for (std::size_t a = 0; a < seen.size();) {
        std::size_t b = a;
        while (b < seen.size() && seen[b] == seen[a]) ++b;
        const std::size_t c = b - a;
        if (c > best_count) {
          best_count = c;
          best.assign(1, seen[a]);
        } else if (c == best_count) {
          best.push_back(seen[a]);
        }
        a = b;
      }
      if (std::find(best.begin(), best.end(), labels[u]) != best.end()) continue;
      labels[u] = best.size() == 1 ? best[0] : best[uniform_below(rng, best.size())];
      changed = true;
    }
    if (!changed) break;
  }
  return CommunityMap::from_assignment(labels);
}

RankedList rank_by_activity(const AttributeMatrix& matrix, std::size_t ell) {
  const std::size_t n = matrix.n_nodes();
  if (ell > n) throw InvalidArgument("rank_by_activity: ell exceeds |V|");
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    return matrix.activity(a) > matrix.activity(b);
  });
  ids.resize(ell);
  return {std::move(ids), ell};
}

RankedList rank_by_degree(const EdgeSet& edges, std::size_t ell) {
  const std::size_t n = edges.n_nodes();
  if (ell > n) throw InvalidArgument("rank_by_degree: ell exceeds |V|");
  auto degree = edges.in_degrees();
  for (NodeId i = 0; i < n; ++i) degree[i] += edges.out_degree(i);
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  std::stable_sort(ids.begin(), ids.end(),
                   [&](NodeId a, NodeId b) { return degree[a] > degree[b]; });
  ids.resize(ell);
  return {std::move(ids), ell};
}

AdHocNet build_adhoc_net(const RankedList& ranked, const AttributeMatrix& matrix, std::size_t m) {
  const std::size_t ell = ranked.ids.size();
  if (m >= ell)
    throw InvalidArgument("build_adhoc_net: m (" + std::to_string(m) + ") must be < ell (" +
                          std::to_string(ell) + ")");
  const std::size_t n = matrix.n_nodes();
  AdHocNet net{n, ranked.ids, std::vector<std::vector<NodeId>>(n), m};

  SimilarityIndex index(matrix);
  std::vector<double> scores(n, 0.0);
  std::vector<NodeId> touched;
  std::vector<NodeId> candidates;
  for (NodeId i = 0; i < n; ++i) {
    index.score(i, scores, touched);
    candidates.clear();
    for (NodeId p : ranked.ids)
      if (p != i) candidates.push_back(p);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(m),
                      candidates.end(), [&](NodeId a, NodeId b) {
                        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                      });
    auto& out = net.out[i];
    out.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(out.begin(), out.end());
    for (NodeId j : touched) scores[j] = 0.0;
  }
  return net;
}

QueryRep prune_to_reach(const QueryRep& rep, const ReachLog& log) {
  auto keep = [&](NodeId i) { return i < log.n_nodes() && log.contains(i); };
  auto filter = [&](const std::vector<NodeId>& ids) {
    std::vector<NodeId> out;
    for (NodeId i : ids)
      if (keep(i)) out.push_back(i);
    return out;
  };

  QueryRep pruned = rep;
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EdgeSet>) {
          std::vector<std::vector<NodeId>> adj(p.n_nodes());
          for (NodeId i = 0; i < p.n_nodes(); ++i)
            if (keep(i)) adj[i] = filter(p.adjacency()[i]);
          p = EdgeSet::from_adjacency(std::move(adj), p.directed());
        } else if constexpr (std::is_same_v<T, CommunityMap>) {
          std::vector<std::vector<NodeId>> members;
          for (const auto& list : p.all_members())
            members.push_back(filter(list));
          p = CommunityMap::from_members(p.n_nodes(), std::move(members));
        } else if constexpr (std::is_same_v<T, RankedList>) {
          p.ids = filter(p.ids);
        } else if constexpr (std::is_same_v<T, AdHocNet>) {
          p.pool = filter(p.pool);
          for (NodeId i = 0; i < p.n_nodes; ++i) {
            if (keep(i))
              p.out[i] = filter(p.out[i]);
            else
              p.out[i].clear();
          }
        } else {
          p.ids = filter(p.ids);
        }
      },
      pruned.payload);
  return pruned;
}

std::size_t payload_size(const QueryRep& rep) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        std::size_t s = 0;
        if constexpr (std::is_same_v<T, EdgeSet>) {
          s = p.edge_count();
        } else if constexpr (std::is_same_v<T, CommunityMap>) {
          for (const auto& l : p.all_members()) s += l.size();
        } else if constexpr (std::is_same_v<T, AdHocNet>) {
          for (const auto& l : p.out) s += l.size();
        } else {
          s = p.ids.size();
        }
        return s;
      },
      rep.payload);
}

}  // namespace netsel
