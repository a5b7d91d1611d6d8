#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "netsel/error.hpp"
#include "netsel/queryfn.hpp"
#include "support.hpp"

using namespace netsel;

namespace {

EdgeSet path_graph(std::size_t n) {
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return EdgeSet::from_adjacency(std::move(adj));
}

EdgeSet two_cliques() {
  std::vector<std::vector<NodeId>> adj(10);
  for (NodeId base : {0u, 5u})
    for (NodeId i = base; i < base + 5; ++i)
      for (NodeId j = base; j < base + 5; ++j)
        if (i != j) adj[i].push_back(j);
  return EdgeSet::from_adjacency(std::move(adj));
}

// BFS level of every node from s over out-edges; -1 when unreachable.
std::vector<int> bfs_levels(const EdgeSet& g, NodeId s) {
  std::vector<int> level(g.n_nodes(), -1);
  std::queue<NodeId> q;
  level[s] = 0;
  q.push(s);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : g.out(u))
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
  }
  return level;
}

// One representation of every kind over a shared random graph and matrix.
std::vector<QueryRep> all_reps(Rng& rng, std::size_t n) {
  auto g = fixture::random_graph(rng, n, 0.15);
  auto m = fixture::random_matrix(rng, n, 40, 0.2);
  auto by_degree = rank_by_degree(g, 20);
  auto by_activity = rank_by_activity(m, 20);
  return {make_bfs_rep(g),
          make_cluster_rep(detect_communities(g, 3)),
          make_top_rep(QueryKind::degree_top, by_degree),
          make_top_rep(QueryKind::activity_top, by_activity),
          make_net_rep(QueryKind::degree_net, build_adhoc_net(by_degree, m, 8)),
          make_net_rep(QueryKind::activity_net, build_adhoc_net(by_activity, m, 8)),
          make_random_rep(n)};
}

}  // namespace

TEST(Query, KindNames) {
  for (QueryKind k : kAllQueryKinds) EXPECT_EQ(parse_query_kind(to_string(k)), k);
  EXPECT_EQ(parse_query_kind("degree-top"), QueryKind::degree_top);
  EXPECT_THROW(parse_query_kind("pagerank"), InvalidArgument);
}

TEST(Query, RandomForcedComplement) {
  auto rep = make_random_rep(10);
  ReachLog log(10);
  Rng rng(1);
  for (NodeId i = 0; i < 10; ++i) {
    auto s = query(rep, i, 9, rng, log);
    std::vector<NodeId> expect;
    for (NodeId j = 0; j < 10; ++j)
      if (j != i) expect.push_back(j);
    EXPECT_EQ(s.members, expect);
  }
  EXPECT_THROW(query(rep, 0, 10, rng, log), InsufficientNodes);
}

TEST(Query, BfsOnPath) {
  auto rep = make_bfs_rep(path_graph(5));
  ReachLog log(5);
  Rng rng(2);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(query(rep, 0, 2, rng, log).members, (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(log.members(), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_THROW(query(rep, 0, 5, rng, log), InsufficientNodes);
  EXPECT_EQ(query(rep, 2, 2, rng, log).members, (std::vector<NodeId>{1, 3}));
}

TEST(Query, BfsInnerLevelsComplete) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = fixture::random_graph(rng, 40, 0.06);
    auto rep = make_bfs_rep(g);
    ReachLog log(40);
    for (NodeId i = 0; i < 40; i += 3) {
      const auto level = bfs_levels(g, i);
      for (std::size_t k : {1u, 4u, 9u, 15u}) {
        auto s = try_query(rep, i, k, rng, log);
        std::size_t reachable = 0;
        for (NodeId j = 0; j < 40; ++j) reachable += j != i && level[j] > 0;
        if (!s) {
          EXPECT_LT(reachable, k);
          continue;
        }
        int deepest = 0;
        for (NodeId j : s->members) {
          ASSERT_GT(level[j], 0);
          deepest = std::max(deepest, level[j]);
        }
        std::set<NodeId> got(s->members.begin(), s->members.end());
        for (NodeId j = 0; j < 40; ++j)
          if (level[j] > 0 && level[j] < deepest) EXPECT_TRUE(got.count(j)) << "missing inner node " << j;
      }
    }
  }
}

TEST(Query, BfsFrontierIsUniform) {
  // star: seed 0 points at 1..10; k=3 picks 3 of the 10 uniformly
  std::vector<std::vector<NodeId>> adj(11);
  for (NodeId j = 1; j <= 10; ++j) adj[0].push_back(j);
  auto rep = make_bfs_rep(EdgeSet::from_adjacency(adj));
  ReachLog log(11);
  Rng rng(4);
  std::vector<int> hits(11, 0);
  const int trials = 6000;
  for (int t = 0; t < trials; ++t)
    for (NodeId j : query(rep, 0, 3, rng, log).members) ++hits[j];
  for (NodeId j = 1; j <= 10; ++j) EXPECT_NEAR(hits[j] / double(trials), 0.3, 0.03);
}

TEST(Query, SampleContractAcrossAllKinds) {
  Rng rng(5);
  const std::size_t n = 60;
  auto reps = all_reps(rng, n);
  for (const auto& rep : reps) {
    ReachLog log(n);
    std::size_t produced = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto i = static_cast<NodeId>(uniform_below(rng, n));
      const std::size_t k = 1 + uniform_below(rng, 7);
      auto s = try_query(rep, i, k, rng, log);
      if (!s) continue;
      ++produced;
      ASSERT_EQ(s->members.size(), k) << to_string(rep.kind);
      EXPECT_TRUE(std::is_sorted(s->members.begin(), s->members.end()));
      EXPECT_EQ(std::adjacent_find(s->members.begin(), s->members.end()), s->members.end());
      EXPECT_EQ(std::count(s->members.begin(), s->members.end(), i), 0);
      for (NodeId j : s->members) EXPECT_TRUE(log.contains(j));
      EXPECT_TRUE(log.contains(i));
    }
    EXPECT_GT(produced, 0u) << to_string(rep.kind);
  }
}

TEST(Query, SamplersArePureFunctionsOfRngState) {
  Rng rng(6);
  auto reps = all_reps(rng, 50);
  for (const auto& rep : reps) {
    ReachLog a(50), b(50);
    Rng r1(77), r2(77);
    for (NodeId i = 0; i < 50; ++i) {
      auto s1 = try_query(rep, i, 4, r1, a);
      auto s2 = try_query(rep, i, 4, r2, b);
      ASSERT_EQ(s1.has_value(), s2.has_value());
      if (s1) EXPECT_EQ(s1->members, s2->members);
    }
    EXPECT_EQ(a.members(), b.members());
  }
}

TEST(Query, ClusterStaysInCommunity) {
  auto map = detect_communities(two_cliques(), 1);
  auto rep = make_cluster_rep(map);
  ReachLog log(10);
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto i = static_cast<NodeId>(uniform_below(rng, 10));
    for (NodeId j : query(rep, i, 3, rng, log).members) EXPECT_EQ(map.community_of(j), map.community_of(i));
  }
  EXPECT_THROW(query(rep, 0, 5, rng, log), InsufficientNodes);
}

TEST(Query, TopExcludesSeedBeforeSampling) {
  auto rep = make_top_rep(QueryKind::activity_top, RankedList{{4, 2, 7}, 3});
  ReachLog log(8);
  Rng rng(8);
  EXPECT_EQ(query(rep, 2, 2, rng, log).members, (std::vector<NodeId>{4, 7}));
  EXPECT_THROW(query(rep, 2, 3, rng, log), InsufficientNodes);
  EXPECT_EQ(query(rep, 0, 3, rng, log).members, (std::vector<NodeId>{2, 4, 7}));
}

TEST(Query, NetNeedsMAtLeastK) {
  Rng rng(9);
  auto m = fixture::random_matrix(rng, 20, 15, 0.3);
  auto rep = make_net_rep(QueryKind::activity_net, build_adhoc_net(rank_by_activity(m, 6), m, 3));
  ReachLog log(20);
  EXPECT_EQ(query(rep, 0, 3, rng, log).members.size(), 3u);
  EXPECT_THROW(query(rep, 0, 4, rng, log), InsufficientNodes);
  EXPECT_THROW(query(rep, 0, 0, rng, log), InvalidArgument);
}

TEST(Communities, TwoCliques) {
  auto map = detect_communities(two_cliques(), 42);
  ASSERT_EQ(map.n_communities(), 2u);
  for (NodeId i = 0; i < 10; ++i) EXPECT_EQ(map.community_of(i), i < 5 ? 0u : 1u);
}

TEST(Communities, EmptyGraphGivesSingletons) {
  auto map = detect_communities(EdgeSet(7), 1);
  EXPECT_EQ(map.n_communities(), 7u);
  for (NodeId i = 0; i < 7; ++i) EXPECT_EQ(map.members(map.community_of(i)).size(), 1u);
}

TEST(Communities, DeterministicAndAPartition) {
  Rng rng(10);
  auto g = fixture::random_graph(rng, 80, 0.04);
  auto a = detect_communities(g, 5);
  EXPECT_EQ(a, detect_communities(g, 5));
  std::size_t total = 0;
  for (std::uint32_t c = 0; c < a.n_communities(); ++c) {
    total += a.members(c).size();
    for (NodeId i : a.members(c)) EXPECT_EQ(a.community_of(i), c);
  }
  EXPECT_EQ(total, 80u);
}

TEST(Communities, FromMembersAndAssignment) {
  std::vector<std::uint32_t> assign = {7, 3, 7, 3, 9};
  auto map = CommunityMap::from_assignment(assign);
  EXPECT_EQ(map.n_communities(), 3u);
  EXPECT_EQ(map.community_of(0), 0u);
  EXPECT_EQ(map.community_of(1), 1u);
  EXPECT_EQ(map.community_of(4), 2u);
  EXPECT_THROW(CommunityMap::from_members(3, {{0, 1}, {1}}), InvalidArgument);
}

TEST(Ranking, ActivityTieBreakAndDominance) {
  auto zero = AttributeMatrix::from_triplets(6, 3, {});
  EXPECT_EQ(rank_by_activity(zero, 4).ids, (std::vector<NodeId>{0, 1, 2, 3}));

  std::vector<Triplet> t;
  for (ItemId it = 0; it < 10; ++it) t.push_back({3, it, 1.0});
  for (NodeId i = 0; i < 6; ++i)
    if (i != 3) t.push_back({i, 0, 1.0});
  auto m = AttributeMatrix::from_triplets(6, 10, t);
  EXPECT_EQ(rank_by_activity(m, 6).ids.front(), 3u);
  EXPECT_THROW(rank_by_activity(m, 7), InvalidArgument);
}

TEST(Ranking, ActivityMatchesRecount) {
  Rng rng(11);
  auto m = fixture::random_matrix(rng, 50, 30, 0.2);
  std::vector<std::pair<long, NodeId>> keyed;
  for (NodeId i = 0; i < 50; ++i) {
    long count = 0;
    for (ItemId it = 0; it < 30; ++it) count += m.value(i, it) != 0.0;
    keyed.push_back({-count, i});
  }
  std::sort(keyed.begin(), keyed.end());
  auto r = rank_by_activity(m, 15);
  ASSERT_EQ(r.ids.size(), 15u);
  for (std::size_t p = 0; p < 15; ++p) EXPECT_EQ(r.ids[p], keyed[p].second);
}

TEST(Ranking, DegreeStarAndRecount) {
  std::vector<std::vector<NodeId>> star(6);
  for (NodeId j = 0; j < 6; ++j)
    if (j != 4) star[j].push_back(4);
  EXPECT_EQ(rank_by_degree(EdgeSet::from_adjacency(star), 1).ids, (std::vector<NodeId>{4}));
  EXPECT_EQ(rank_by_degree(EdgeSet(5), 3).ids, (std::vector<NodeId>{0, 1, 2}));

  Rng rng(12);
  auto g = fixture::random_graph(rng, 40, 0.1);
  std::vector<long> degree(40, 0);
  for (NodeId i = 0; i < 40; ++i)
    for (NodeId j = 0; j < 40; ++j)
      if (g.has_edge(i, j)) {
        ++degree[i];
        ++degree[j];
      }
  std::vector<std::pair<long, NodeId>> keyed;
  for (NodeId i = 0; i < 40; ++i) keyed.push_back({-degree[i], i});
  std::sort(keyed.begin(), keyed.end());
  auto r = rank_by_degree(g, 40);
  for (std::size_t p = 0; p < 40; ++p) EXPECT_EQ(r.ids[p], keyed[p].second);
}

TEST(AdHoc, MatchesPoolSortOracle) {
  Rng rng(13);
  auto m = fixture::random_matrix(rng, 20, 12, 0.3, 4);
  auto ranked = rank_by_activity(m, 6);
  auto net = build_adhoc_net(ranked, m, 3);
  ASSERT_EQ(net.out.size(), 20u);
  for (NodeId i = 0; i < 20; ++i) {
    std::vector<std::pair<double, NodeId>> cand;
    for (NodeId p : ranked.ids) {
      if (p == i) continue;
      double s = 0.0;
      for (ItemId it = 0; it < 12; ++it) s += std::min(m.value(i, it), m.value(p, it));
      cand.push_back({-s, p});
    }
    std::sort(cand.begin(), cand.end());
    std::vector<NodeId> expect;
    for (std::size_t q = 0; q < 3; ++q) expect.push_back(cand[q].second);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(net.out[i], expect) << "node " << i;
  }
  EXPECT_THROW(build_adhoc_net(ranked, m, 6), InvalidArgument);
}

TEST(Prune, FullLogKeepsEverything) {
  Rng rng(14);
  for (const auto& rep : all_reps(rng, 30)) EXPECT_EQ(prune_to_reach(rep, ReachLog::full(30)), rep);
}

TEST(Prune, EmptyLogEmptiesPayload) {
  Rng rng(15);
  for (const auto& rep : all_reps(rng, 30)) {
    auto pruned = prune_to_reach(rep, ReachLog(30));
    EXPECT_EQ(payload_size(pruned), 0u) << to_string(rep.kind);
    EXPECT_EQ(pruned.kind, rep.kind);
    EXPECT_EQ(pruned.ell, rep.ell);
    EXPECT_EQ(pruned.m, rep.m);
  }
}

TEST(Prune, InducedSubgraphOracle) {
  Rng rng(16);
  auto g = fixture::random_graph(rng, 10, 0.4);
  ReachLog log(10);
  for (NodeId i = 0; i <= 4; ++i) log.touch(i);
  auto pruned = std::get<EdgeSet>(prune_to_reach(make_bfs_rep(g), log).payload);
  for (NodeId i = 0; i < 10; ++i)
    for (NodeId j = 0; j < 10; ++j) EXPECT_EQ(pruned.has_edge(i, j), g.has_edge(i, j) && i <= 4 && j <= 4);
}

TEST(Prune, NeverGrowsPayload) {
  Rng rng(17);
  auto reps = all_reps(rng, 40);
  for (int t = 0; t < 10; ++t) {
    ReachLog log(40);
    for (NodeId i = 0; i < 40; ++i)
      if (bernoulli(rng, 0.5)) log.touch(i);
    for (const auto& rep : reps) {
      auto pruned = prune_to_reach(rep, log);
      EXPECT_LE(payload_size(pruned), payload_size(rep));
      EXPECT_NO_THROW(validate(pruned));
    }
  }
}

TEST(ReachLogTest, MergeIsUnion) {
  ReachLog a(6), b(6);
  a.touch(1);
  a.touch(3);
  b.touch(3);
  b.touch(5);
  a.merge(b);
  EXPECT_EQ(a.members(), (std::vector<NodeId>{1, 3, 5}));
  EXPECT_EQ(a.size(), 3u);
  EXPECT_THROW(a.merge(ReachLog(4)), InvalidArgument);
}

TEST(Validate, PayloadMustMatchKind) {
  QueryRep bad{QueryKind::bfs, NodePool{3, {0, 1, 2}}, 0, 0};
  EXPECT_THROW(validate(bad), InvalidArgument);
  EXPECT_THROW(make_top_rep(QueryKind::bfs, RankedList{}), InvalidArgument);
}
