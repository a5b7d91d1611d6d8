#pragma once

// Out-degree-preserving rewiring and the noise-sensitivity sweep.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netsel/eval.hpp"
#include "netsel/netmodel.hpp"
#include "netsel/queryfn.hpp"

namespace netsel {

struct RewireStats {
  std::size_t edges = 0;     // out-edges (or list slots) considered
  std::size_t retained = 0;  // not selected for replacement
  std::size_t stuck = 0;     // nodes whose selected edges had no alternative target
};

struct RewiredEdges {
  EdgeSet edges;
  RewireStats stats;
};

/// Each out-edge is independently replaced with probability p by an edge to a uniformly
/// random node that is neither the source nor already in its out-list. Out-degrees are
/// unchanged. Nodes pointing at every other node cannot rewire; they are kept and counted.
RewiredEdges rewire_noise(const EdgeSet& edges, double p, Rng& rng);

struct RewiredAdHoc {
  AdHocNet net;
  RewireStats stats;
};

/// As rewire_noise on the out-lists of an ad-hoc net; new targets may fall outside the pool.
RewiredAdHoc rewire_adhoc(const AdHocNet& net, double p, Rng& rng);

struct PerturbedRep {
  QueryRep rep;
  RewireStats stats;
};

/// Noise applied to any representation:
///   bfs: rewire_noise on the edge set
///   degree_net, activity_net: rewire_adhoc
///   degree_top, activity_top: each listed id is replaced with probability p by a random
///     node not currently listed
///   cluster: each node moves with probability p to a uniformly chosen community
///     (the draw may return its own community)
///   random: unchanged
PerturbedRep perturb_rep(const QueryRep& rep, double p, std::size_t n_nodes, Rng& rng);

struct NoiseRow {
  double p = 0.0;
  EfficiencyEntry pooled;
  bool has_significance = false;
  double significance_score = 0.0;
  bool significant = false;
  RewireStats stats;
};

struct NoiseSweep {
  std::string model;
  std::vector<NoiseRow> rows;
};

/// Requires an ascending grid in [0, 1] starting at 0.
void validate_noise_grid(std::span<const double> p_grid);

/// Perturbs only models[target], re-runs it with its original stream key, and scores its
/// efficiency against the untouched cohort in `baseline`.
NoiseSweep noise_sweep(std::span<const ModelSpec> models, std::size_t target, std::span<const double> p_grid,
                       const EfficiencyTable& baseline, const EvalContext& ctx, const EvalConfig& cfg,
                       const TaskLearner& learner);

}  // namespace netsel
