#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "netsel/error.hpp"
#include "netsel/eval.hpp"
#include "netsel/synthetic.hpp"
#include "support.hpp"

using namespace netsel;

namespace {

// Replicate t predicts positive when t < correct[k]; cost is fixed per k.
class TableLearner final : public TaskLearner {
 public:
  TableLearner(std::map<std::size_t, std::size_t> correct, std::map<std::size_t, std::size_t> cost)
      : correct_(std::move(correct)), cost_(std::move(cost)) {}
  TaskOutcome fit_and_predict(const TaskInput& in, Rng&) const override {
    return {in.replicate < correct_.at(in.k), cost_.at(in.k)};
  }

 private:
  std::map<std::size_t, std::size_t> correct_, cost_;
};

// Always right, cost c.
class ConstantLearner final : public TaskLearner {
 public:
  explicit ConstantLearner(std::size_t c) : c_(c) {}
  TaskOutcome fit_and_predict(const TaskInput&, Rng&) const override { return {true, c_}; }

 private:
  std::size_t c_;
};

// Prediction and cost drawn from the replicate stream.
class NoisyLearner final : public TaskLearner {
 public:
  TaskOutcome fit_and_predict(const TaskInput& in, Rng& rng) const override {
    return {bernoulli(rng, 0.6), 50 + in.k + uniform_below(rng, 40)};
  }
};

struct World {
  AttributeMatrix train, eval;
  LabelCatalog labels;
  EvalContext ctx() const { return {&train, &labels, &eval, &labels}; }
};

World uniform_world(std::size_t n, std::vector<NodeId> positives) {
  Rng rng(1);
  World w;
  w.train = fixture::random_matrix(rng, n, 10, 0.3);
  w.eval = fixture::random_matrix(rng, n, 10, 0.3);
  w.labels = LabelCatalog(n);
  w.labels.add("pos", std::move(positives));
  return w;
}

World synthetic_world(std::size_t n) {
  SyntheticConfig cfg;
  cfg.n_nodes = n;
  cfg.n_items = 200;
  cfg.n_communities = 3;
  cfg.n_labelsets = 2;
  auto data = generate_synthetic(cfg);
  return {data.partitions[1], data.partitions[0], data.labels};
}

EvalConfig config(std::size_t b, std::vector<std::size_t> k) {
  EvalConfig c;
  c.b = b;
  c.k_grid = std::move(k);
  c.master_seed = 5;
  return c;
}

EdgeSet seeded_graph(std::uint64_t seed, std::size_t n, double p) {
  Rng rng(seed);
  return fixture::random_graph(rng, n, p);
}

NodeEval node_with(std::vector<KStats> per_k) {
  NodeEval ev;
  ev.per_k = std::move(per_k);
  finalize(ev);
  return ev;
}

}  // namespace

TEST(Kappa, StubTableExample) {
  auto w = uniform_world(100, {3});
  ReachLog log(100);
  TableLearner learner({{25, 2}, {50, 8}, {75, 6}}, {{25, 100}, {50, 200}, {75, 300}});
  auto cfg = config(10, {25, 50, 75});
  auto ev = evaluate_node(make_random_rep(100), 3, 0, w.ctx(), cfg, learner, 1, log);
  ASSERT_TRUE(ev);
  // ratios 0.02, 0.04, 0.02
  EXPECT_EQ(ev->kappa(), 50u);
  EXPECT_DOUBLE_EQ(ev->efficiency, 0.04);
  EXPECT_EQ(ev->per_k[0].correct, 2u);
  EXPECT_EQ(ev->per_k[1].median_cost, 200.0);
}

TEST(Kappa, AlwaysCorrectPicksSmallestK) {
  auto w = uniform_world(60, {0, 1});
  ReachLog log(60);
  ConstantLearner learner(40);
  auto cfg = config(7, {5, 10, 20, 40});
  auto ev = evaluate_node(make_random_rep(60), 1, 0, w.ctx(), cfg, learner, 1, log);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->kappa(), 5u);
  EXPECT_DOUBLE_EQ(ev->efficiency, 7.0 / 40.0);
}

TEST(Kappa, ArgmaxMatchesBruteForce) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    std::vector<KStats> per_k;
    const std::size_t nk = 1 + uniform_below(rng, 6);
    for (std::size_t i = 0; i < nk; ++i) {
      KStats s;
      s.k = 10 * (i + 1);
      s.correct = uniform_below(rng, 5);
      s.median_cost = static_cast<double>(1 + uniform_below(rng, 8)) * 0.5;
      per_k.push_back(s);
    }
    // exact rational comparison on doubled integer costs
    std::size_t best = 0;
    for (std::size_t i = 1; i < nk; ++i) {
      const auto ci = static_cast<long>(per_k[i].correct), cb = static_cast<long>(per_k[best].correct);
      const auto wi = static_cast<long>(per_k[i].median_cost * 2), wb = static_cast<long>(per_k[best].median_cost * 2);
      if (ci * wb > cb * wi) best = i;
    }
    EXPECT_EQ(choose_kappa(per_k), best);
    auto ev = node_with(per_k);
    for (const auto& s : ev.per_k)
      EXPECT_LE(static_cast<double>(s.correct) / s.median_cost, ev.efficiency);
  }
}

TEST(Kappa, SkipsSizesWithoutEnoughNodes) {
  auto w = uniform_world(12, {0});
  std::vector<std::uint32_t> assign(12, 1);
  for (NodeId i = 0; i < 5; ++i) assign[i] = 0;  // node 0's community has 5 members
  auto rep = make_cluster_rep(CommunityMap::from_assignment(assign));
  ConstantLearner learner(10);
  ReachLog log(12);
  auto ev = evaluate_node(rep, 0, 0, w.ctx(), config(3, {2, 4, 6}), learner, 1, log);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->skipped_k, (std::vector<std::size_t>{6}));
  EXPECT_EQ(ev->per_k.size(), 2u);
  EXPECT_FALSE(evaluate_node(rep, 0, 0, w.ctx(), config(3, {6, 8}), learner, 1, log));
}

TEST(Kappa, PurePositiveSampleForestIsCorrect) {
  std::vector<NodeId> all(40);
  std::iota(all.begin(), all.end(), NodeId{0});
  auto w = uniform_world(40, all);
  ReachLog log(40);
  ForestLearner learner({});
  auto ev = evaluate_node(make_random_rep(40), 4, 0, w.ctx(), config(1, {10}), learner, 1, log);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->at_kappa().correct, 1u);
}

TEST(Kappa, SumAggregateAddsReplicateCosts) {
  auto w = uniform_world(40, {2});
  TableLearner learner({{5, 3}}, {{5, 30}});
  auto cfg = config(4, {5});
  cfg.cost_aggregate = CostAggregate::sum;
  ReachLog log(40);
  auto ev = evaluate_node(make_random_rep(40), 2, 0, w.ctx(), cfg, learner, 1, log);
  EXPECT_EQ(ev->at_kappa().cost_at_k, 120.0);
  EXPECT_EQ(ev->at_kappa().median_cost, 30.0);
  EXPECT_DOUBLE_EQ(ev->efficiency, 3.0 / 30.0);
}

TEST(Aggregate, SingleNodeArithmetic) {
  KStats s{10, 5, 500.0, 500.0, 0.0};
  std::vector<NodeEval> nodes = {node_with({s})};
  EvalConfig cfg;
  auto e = aggregate(nodes, 500, cfg);
  EXPECT_DOUBLE_EQ(e.efficiency, 0.005);
  EXPECT_LT(aggregate(nodes, 1000, cfg).efficiency, e.efficiency);
  cfg.include_rep_cost = false;
  EXPECT_DOUBLE_EQ(aggregate(nodes, 500, cfg).efficiency, 0.01);
  EXPECT_THROW(aggregate(std::vector<NodeEval>{}, 5, cfg), InvalidArgument);
}

TEST(Aggregate, MatchesSumAndDivide) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<NodeEval> nodes;
    for (int i = 0; i < 10; ++i) {
      std::vector<KStats> per_k;
      for (std::size_t k : {25u, 50u, 75u}) {
        const double cost = 100.0 + static_cast<double>(uniform_below(rng, 900));
        per_k.push_back({k, uniform_below(rng, 21), cost, cost, 0.0});
      }
      nodes.push_back(node_with(per_k));
    }
    const std::size_t rep = uniform_below(rng, 5000);
    long correct = 0;
    double cost = 0.0;
    for (const auto& n : nodes) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n.per_k.size(); ++i)
        if (n.per_k[i].correct * n.per_k[best].median_cost > n.per_k[best].correct * n.per_k[i].median_cost) best = i;
      correct += static_cast<long>(n.per_k[best].correct);
      cost += n.per_k[best].median_cost;
    }
    auto e = aggregate(nodes, rep, EvalConfig{});
    EXPECT_EQ(e.correct_total, correct);
    EXPECT_EQ(e.task_cost_total, cost);
    EXPECT_EQ(e.efficiency, static_cast<double>(correct) / (cost + static_cast<double>(rep)));
  }
}

TEST(RunModel, CheaperRepresentationWins) {
  auto w = uniform_world(50, {1, 2, 3, 4});
  // a dense random graph; a complete one compresses too well to make the point
  std::vector<ModelSpec> models = {{"dense", make_bfs_rep(seeded_graph(12, 50, 0.6))},
                                   {"pool", make_random_rep(50)}};
  ConstantLearner learner(100);
  auto table = evaluate_models(models, w.ctx(), config(3, {5}), learner);
  EXPECT_EQ(table.models[0].pooled.correct_total, table.models[1].pooled.correct_total);
  EXPECT_GT(table.models[0].pooled.rep_cost_pruned, 10 * table.models[1].pooled.rep_cost_pruned);
  EXPECT_EQ(table.selected, 1u);
  EXPECT_TRUE(table.significance.empty());
}

TEST(RunModel, EntriesRecomputeFromStoredFields) {
  auto w = synthetic_world(60);
  auto data_graph = seeded_graph(4, 60, 0.2);
  std::vector<ModelSpec> models = {{"g", make_bfs_rep(data_graph)}, {"r", make_random_rep(60)}};
  auto cfg = config(3, {4, 8});
  for (const auto& spec : models) {
    auto res = run_model(spec, w.ctx(), cfg, NoisyLearner{});
    for (const auto& e : res.per_labelset) {
      if (e.nodes_evaluated == 0) continue;
      EXPECT_EQ(e.efficiency, efficiency_of(e.correct_total, e.task_cost_total, e.rep_cost_pruned, true));
      EXPECT_LE(e.rep_cost_pruned, e.rep_cost_full);
    }
    const auto& p = res.pooled;
    EXPECT_EQ(p.efficiency, efficiency_of(p.correct_total, p.task_cost_total, p.rep_cost_pruned, true));
    std::int64_t correct = 0;
    std::size_t evaluated = 0;
    for (const auto& e : res.per_labelset) {
      correct += e.correct_total;
      evaluated += e.nodes_evaluated;
    }
    EXPECT_EQ(p.correct_total, correct);
    EXPECT_EQ(p.nodes_evaluated, evaluated);
    EXPECT_EQ(p.labelset, "*");
  }
}

TEST(RunModel, EvaluatesEveryPositiveNode) {
  auto w = synthetic_world(60);
  auto res = run_model({"r", make_random_rep(60)}, w.ctx(), config(2, {3}), ConstantLearner(9));
  for (std::size_t l = 0; l < w.labels.size(); ++l) {
    std::vector<NodeId> seen;
    for (const auto& ev : res.node_evals[l]) seen.push_back(ev.node);
    EXPECT_EQ(seen, w.labels[l].positives);
  }
}

TEST(RunModel, DeterministicAcrossRunsAndJobs) {
  auto w = synthetic_world(80);
  auto g = seeded_graph(5, 80, 0.08);
  ModelSpec spec{"g", make_bfs_rep(g)};
  auto cfg = config(3, {5, 10});
  ForestLearner learner(cfg.hyper);
  auto a = run_model(spec, w.ctx(), cfg, learner);
  auto b = run_model(spec, w.ctx(), cfg, learner);
  cfg.jobs = 4;
  auto c = run_model(spec, w.ctx(), cfg, learner);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  cfg.master_seed = 6;
  EXPECT_NE(run_model(spec, w.ctx(), cfg, learner).pooled, a.pooled);
}

TEST(RunModel, ScalingAllTaskCostsKeepsSelection) {
  auto w = synthetic_world(60);
  std::vector<ModelSpec> models = {{"a", make_random_rep(60)},
                                   {"b", make_top_rep(QueryKind::activity_top, rank_by_activity(w.train, 20))},
                                   {"c", make_bfs_rep(seeded_graph(6, 60, 0.2))}};
  auto cfg = config(3, {4});
  cfg.include_rep_cost = false;
  class Scaled final : public TaskLearner {
   public:
    explicit Scaled(std::size_t f) : f_(f) {}
    TaskOutcome fit_and_predict(const TaskInput& in, Rng& rng) const override {
      auto o = NoisyLearner{}.fit_and_predict(in, rng);
      o.cost_bytes *= f_;
      return o;
    }

   private:
    std::size_t f_;
  };
  auto t1 = evaluate_models(models, w.ctx(), cfg, Scaled(1));
  auto t7 = evaluate_models(models, w.ctx(), cfg, Scaled(7));
  EXPECT_EQ(t1.selected, t7.selected);
}

TEST(RunModel, AllSkippedLabelsetStillCarriesRepCost) {
  auto w = uniform_world(20, {0, 1});
  auto res = run_model({"r", make_random_rep(20)}, w.ctx(), config(2, {30}), ConstantLearner(5));
  EXPECT_EQ(res.pooled.nodes_evaluated, 0u);
  EXPECT_EQ(res.pooled.nodes_skipped, 2u);
  EXPECT_EQ(res.pooled.efficiency, 0.0);
  EXPECT_EQ(res.pooled.reach, 0u);
  EXPECT_GT(res.pooled.rep_cost_full, 0u);
}

TEST(RunModel, RejectsMismatchedInputs) {
  auto w = uniform_world(20, {0});
  EXPECT_THROW(run_model({"r", make_random_rep(21)}, w.ctx(), config(1, {2}), ConstantLearner(5)), InvalidArgument);
  EXPECT_THROW(run_model({"r", make_random_rep(20)}, w.ctx(), config(0, {2}), ConstantLearner(5)), InvalidArgument);
  EXPECT_THROW(run_model({"r", make_random_rep(20)}, w.ctx(), config(1, {4, 2}), ConstantLearner(5)), InvalidArgument);
  EXPECT_THROW(parse_cost_aggregate("mean"), InvalidArgument);
}

TEST(Selection, TieGoesToEarlierModel) {
  std::vector<ModelResult> models(3);
  models[0].pooled.efficiency = 0.5;
  models[1].pooled.efficiency = 0.7;
  models[2].pooled.efficiency = 0.7;
  EXPECT_EQ(select_model(models), 1u);
}
