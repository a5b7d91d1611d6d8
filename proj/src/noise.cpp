#include "netsel/noise.hpp"

#include <algorithm>
#include <bit>

#include "netsel/error.hpp"

namespace netsel {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("noise probability must lie in [0, 1]");
}

// Rewires sorted, self-loop-free out-lists over n nodes in place.
RewireStats rewire_lists(std::vector<std::vector<NodeId>>& lists, std::size_t n, double p, Rng& rng) {
  check_probability(p);
  RewireStats stats;
  std::vector<std::size_t> mark(n, 0);  // mark[j] == i + 1 while j is in i's list
  for (std::size_t i = 0; i < lists.size(); ++i) {
    auto& out = lists[i];
    stats.edges += out.size();
    if (out.empty()) continue;
    if (p == 0.0) {
      stats.retained += out.size();
      continue;
    }
    for (NodeId j : out) mark[j] = i + 1;
    const bool saturated = out.size() + 1 >= n;
    bool stuck = false;
    for (auto& target : out) {
      if (!bernoulli(rng, p)) {
        ++stats.retained;
        continue;
      }
      if (saturated) {
        stuck = true;
        continue;
      }
      mark[target] = 0;
      NodeId pick;
      do {
        pick = static_cast<NodeId>(uniform_below(rng, n));
      } while (pick == i || mark[pick] == i + 1);
      target = pick;
      mark[pick] = i + 1;
    }
    if (stuck) ++stats.stuck;
    std::sort(out.begin(), out.end());
  }
  return stats;
}

}  // namespace

RewiredEdges rewire_noise(const EdgeSet& edges, double p, Rng& rng) {
  auto adj = edges.adjacency();
  RewiredEdges out;
  out.stats = rewire_lists(adj, edges.n_nodes(), p, rng);
  out.edges = EdgeSet::from_adjacency(std::move(adj), edges.directed());
  return out;
}

RewiredAdHoc rewire_adhoc(const AdHocNet& net, double p, Rng& rng) {
  RewiredAdHoc out;
  out.net = net;
  out.stats = rewire_lists(out.net.out, net.n_nodes, p, rng);
  return out;
}

PerturbedRep perturb_rep(const QueryRep& rep, double p, std::size_t n_nodes, Rng& rng) {
  check_probability(p);
  if (rep.n_nodes() != 0 && rep.n_nodes() != n_nodes)
    throw InvalidArgument("perturb_rep: node universe mismatch");
  PerturbedRep out{rep, {}};
  switch (rep.kind) {
    case QueryKind::bfs: {
      auto r = rewire_noise(std::get<EdgeSet>(rep.payload), p, rng);
      out.rep = make_bfs_rep(std::move(r.edges));
      out.stats = r.stats;
      break;
    }
    case QueryKind::degree_net:
    case QueryKind::activity_net: {
      auto r = rewire_adhoc(std::get<AdHocNet>(rep.payload), p, rng);
      out.rep = make_net_rep(rep.kind, std::move(r.net));
      out.stats = r.stats;
      break;
    }
    case QueryKind::degree_top:
    case QueryKind::activity_top: {
      RankedList ranked = std::get<RankedList>(rep.payload);
      const std::size_t n = n_nodes;
      for (NodeId id : ranked.ids)
        if (id >= n) throw InvalidArgument("ranked list id outside the node universe");
      out.stats.edges = ranked.ids.size();
      std::vector<std::uint8_t> listed(n, 0);
      for (NodeId id : ranked.ids) listed[id] = 1;
      const bool saturated = ranked.ids.size() >= n;
      for (auto& id : ranked.ids) {
        if (!bernoulli(rng, p)) {
          ++out.stats.retained;
          continue;
        }
        if (saturated) {
          ++out.stats.stuck;
          continue;
        }
        NodeId pick;
        do {
          pick = static_cast<NodeId>(uniform_below(rng, n));
        } while (listed[pick]);
        listed[id] = 0;
        listed[pick] = 1;
        id = pick;
      }
      out.rep = make_top_rep(rep.kind, std::move(ranked));
      break;
    }
    case QueryKind::cluster: {
      const auto& cm = std::get<CommunityMap>(rep.payload);
      const std::size_t c = cm.n_communities();
      std::vector<std::vector<NodeId>> members(c);
      for (NodeId i = 0; i < cm.n_nodes(); ++i) {
        std::uint32_t a = cm.community_of(i);
        if (a == CommunityMap::kNone) continue;
        ++out.stats.edges;
        if (c > 1 && bernoulli(rng, p)) {
          a = static_cast<std::uint32_t>(uniform_below(rng, c));
        } else {
          ++out.stats.retained;
        }
        members[a].push_back(i);
      }
      out.rep = make_cluster_rep(CommunityMap::from_members(cm.n_nodes(), std::move(members)));
      break;
    }
    case QueryKind::random:
      break;
  }
  out.rep.ell = rep.ell;
  out.rep.m = rep.m;
  return out;
}

void validate_noise_grid(std::span<const double> p_grid) {
  if (p_grid.empty() || p_grid.front() != 0.0) throw InvalidArgument("noise grid must start at 0");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    check_probability(p_grid[i]);
    if (i > 0 && p_grid[i] <= p_grid[i - 1]) throw InvalidArgument("noise grid must be strictly ascending");
  }
}

NoiseSweep noise_sweep(std::span<const ModelSpec> models, std::size_t target, std::span<const double> p_grid,
                       const EfficiencyTable& baseline, const EvalContext& ctx, const EvalConfig& cfg,
                       const TaskLearner& learner) {
  validate_noise_grid(p_grid);
  if (target >= models.size()) throw InvalidArgument("noise target out of range");
  if (baseline.models.size() != models.size()) throw InvalidArgument("baseline does not match the roster");

  const ModelSpec& spec = models[target];
  const std::uint64_t key = fnv1a(spec.name);
  NoiseSweep sweep;
  sweep.model = spec.name;
  auto cohort = pooled_efficiencies(baseline.models);
  for (double p : p_grid) {
    Rng rng = make_stream(cfg.master_seed, {fnv1a("noise"), key, std::bit_cast<std::uint64_t>(p)});
    PerturbedRep noisy = perturb_rep(spec.rep, p, ctx.n_nodes(), rng);
    const ModelResult res = run_model(ModelSpec{spec.name, std::move(noisy.rep)}, ctx, cfg, learner, key);

    NoiseRow row;
    row.p = p;
    row.pooled = res.pooled;
    row.stats = noisy.stats;
    if (cohort.size() >= 4) {
      auto e = cohort;
      e[target] = res.pooled.efficiency;
      const auto s = significance(e, target, cfg.lambda);
      row.has_significance = true;
      row.significance_score = s.score;
      row.significant = s.significant;
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

}  // namespace netsel
