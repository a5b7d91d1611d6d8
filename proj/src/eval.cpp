#include "netsel/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "netsel/error.hpp"

namespace netsel {

std::string_view to_string(CostAggregate a) { return a == CostAggregate::median ? "median" : "sum"; }

CostAggregate parse_cost_aggregate(std::string_view name) {
  if (name == "median") return CostAggregate::median;
  if (name == "sum") return CostAggregate::sum;
  throw InvalidArgument("unknown cost aggregate '" + std::string(name) + "' (expected median or sum)");
}

void validate(const EvalConfig& cfg) {
  if (cfg.b == 0) throw InvalidArgument("b must be at least 1");
  if (cfg.k_grid.empty()) throw InvalidArgument("k grid is empty");
  for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
    if (cfg.k_grid[i] == 0) throw InvalidArgument("k grid values must be positive");
    if (i > 0 && cfg.k_grid[i] <= cfg.k_grid[i - 1])
      throw InvalidArgument("k grid must be strictly ascending");
  }
  if (cfg.hyper.n_trees == 0 || cfg.hyper.min_leaf == 0)
    throw InvalidArgument("forest needs n_trees >= 1 and min_leaf >= 1");
}

void EvalContext::check() const {
  if (!train || !train_labels || !eval || !eval_labels) throw InvalidArgument("incomplete evaluation context");
  const std::size_t n = train->n_nodes();
  if (eval->n_nodes() != n || train_labels->n_nodes() != n || eval_labels->n_nodes() != n)
    throw InvalidArgument("partitions disagree on the node count");
  if (train_labels->size() != eval_labels->size())
    throw InvalidArgument("partitions disagree on the labelsets");
  for (std::size_t l = 0; l < train_labels->size(); ++l)
    if ((*train_labels)[l].name != (*eval_labels)[l].name)
      throw InvalidArgument("labelset order differs between partitions");
}

TaskOutcome ForestLearner::fit_and_predict(const TaskInput& in, Rng& rng) const {
  const TrainSet data = TrainSet::from_sample(in.train, in.members, in.train_mask);
  const TrainedForest forest = train_forest(data, hyper_, rng);
  return {predict(forest, in.seed_row) == 1, mdl::cost(forest_repr(forest))};
}

std::size_t choose_kappa(std::span<const KStats> per_k) {
  if (per_k.empty()) throw InvalidArgument("choose_kappa: no evaluated sample sizes");
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_k.size(); ++i) {
    // correct_i / cost_i > correct_best / cost_best, without division
    const double lhs = static_cast<double>(per_k[i].correct) * per_k[best].median_cost;
    const double rhs = static_cast<double>(per_k[best].correct) * per_k[i].median_cost;
    if (lhs > rhs) best = i;
  }
  return best;
}

void finalize(NodeEval& ev) {
  ev.kappa_index = choose_kappa(ev.per_k);
  const auto& s = ev.at_kappa();
  ev.efficiency = static_cast<double>(s.correct) / s.median_cost;
}

std::optional<NodeEval> evaluate_node(const QueryRep& rep, NodeId node, std::size_t labelset,
                                      const EvalContext& ctx, const EvalConfig& cfg,
                                      const TaskLearner& learner, std::uint64_t model_key,
                                      ReachLog& log) {
  NodeEval ev;
  ev.node = node;
  const SparseRow seed_row = ctx.eval->row(node);
  const auto mask = ctx.train_labels->mask(labelset);
  std::vector<double> costs;
  for (std::size_t k : cfg.k_grid) {
    costs.clear();
    KStats ks;
    ks.k = k;
    bool skipped = false;
    for (std::size_t t = 0; t < cfg.b; ++t) {
      Rng rng = make_stream(cfg.master_seed, {model_key, labelset, node, k, t});
      auto sample = try_query(rep, node, k, rng, log);
      if (!sample) {
        skipped = true;
        break;
      }
      const TaskInput in{*ctx.train, mask, sample->members, seed_row, node, labelset, k, t};
      const TaskOutcome out = learner.fit_and_predict(in, rng);
      if (out.cost_bytes == 0) throw Error("task model reported a zero cost");
      ks.correct += out.predicted_positive ? 1 : 0;
      costs.push_back(static_cast<double>(out.cost_bytes));
    }
    if (skipped) {
      ev.skipped_k.push_back(k);
      continue;
    }
    ks.median_cost = median(costs);
    if (cfg.cost_aggregate == CostAggregate::median) {
      ks.cost_at_k = ks.median_cost;
    } else {
      for (double c : costs) ks.cost_at_k += c;
    }
    ks.cost_cv = costs.size() >= 2 ? coefficient_of_variation(costs) : 0.0;
    ev.per_k.push_back(ks);
  }
  if (ev.per_k.empty()) return std::nullopt;
  finalize(ev);
  return ev;
}

double efficiency_of(std::int64_t correct, double task_cost, std::size_t rep_cost, bool include_rep_cost) {
  const double denom = include_rep_cost ? task_cost + static_cast<double>(rep_cost) : task_cost;
  if (!(denom > 0.0)) throw InvalidArgument("efficiency with a zero total cost");
  return static_cast<double>(correct) / denom;
}

EfficiencyEntry aggregate(std::span<const NodeEval> nodes, std::size_t rep_cost_pruned,
                          const EvalConfig& cfg) {
  if (nodes.empty()) throw InvalidArgument("aggregate: no node evaluations");
  EfficiencyEntry e;
  e.nodes_evaluated = nodes.size();
  e.rep_cost_pruned = rep_cost_pruned;
  double kappa_sum = 0.0;
  std::vector<double> cvs;
  for (const auto& n : nodes) {
    const auto& s = n.at_kappa();
    e.correct_total += static_cast<std::int64_t>(s.correct);
    e.task_cost_total += s.cost_at_k;
    kappa_sum += static_cast<double>(s.k);
    cvs.push_back(s.cost_cv);
  }
  e.mean_kappa = kappa_sum / static_cast<double>(nodes.size());
  e.median_cost_cv = median(cvs);
  e.efficiency = efficiency_of(e.correct_total, e.task_cost_total, rep_cost_pruned, cfg.include_rep_cost);
  return e;
}

namespace {

std::size_t resolve_jobs(std::size_t jobs, std::size_t work) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(jobs, work));
}

// Runs fn(slot, worker) for every slot. Workers pull slots from a shared counter;
// callers store results by slot so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_slots(std::size_t n_slots, std::size_t jobs, Fn fn) {
  if (jobs <= 1) {
    for (std::size_t s = 0; s < n_slots; ++s) fn(s, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < jobs; ++w) {
    threads.emplace_back([&, w] {
      for (;;) {
        const std::size_t s = next.fetch_add(1);
        if (s >= n_slots) return;
        try {
          fn(s, w);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next.store(n_slots);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::size_t rep_cost(const QueryRep& rep, const EvalConfig& cfg) {
  return mdl::cost(mdl::encode_query_rep(rep, cfg.encoding));
}

}  // namespace

ModelResult run_model(const ModelSpec& model, const EvalContext& ctx, const EvalConfig& cfg,
                      const TaskLearner& learner) {
  return run_model(model, ctx, cfg, learner, fnv1a(model.name));
}

ModelResult run_model(const ModelSpec& model, const EvalContext& ctx, const EvalConfig& cfg,
                      const TaskLearner& learner, std::uint64_t model_key) {
  ctx.check();
  validate(cfg);
  validate(model.rep);
  const std::size_t n = ctx.n_nodes();
  if (model.rep.n_nodes() != 0 && model.rep.n_nodes() != n)
    throw InvalidArgument("model '" + model.name + "' covers a different node count");
  const std::size_t n_labelsets = ctx.eval_labels->size();

  struct Slot {
    std::size_t labelset;
    NodeId node;
  };
  std::vector<Slot> slots;
  for (std::size_t l = 0; l < n_labelsets; ++l)
    for (NodeId i : (*ctx.eval_labels)[l].positives) slots.push_back({l, i});

  const std::size_t jobs = resolve_jobs(cfg.jobs, slots.size());
  std::vector<std::vector<ReachLog>> shards(jobs, std::vector<ReachLog>(n_labelsets, ReachLog(n)));
  std::vector<std::optional<NodeEval>> results(slots.size());
  parallel_slots(slots.size(), jobs, [&](std::size_t s, std::size_t w) {
    const Slot& slot = slots[s];
    results[s] = evaluate_node(model.rep, slot.node, slot.labelset, ctx, cfg, learner, model_key,
                               shards[w][slot.labelset]);
  });

  ModelResult out;
  out.name = model.name;
  out.kind = model.rep.kind;
  out.node_evals.resize(n_labelsets);
  std::vector<std::size_t> skipped(n_labelsets, 0);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (results[s]) {
      out.node_evals[slots[s].labelset].push_back(std::move(*results[s]));
    } else {
      ++skipped[slots[s].labelset];
    }
  }

  const std::size_t full_cost = rep_cost(model.rep, cfg);
  ReachLog union_reach(n);
  std::vector<NodeEval> all_nodes;
  for (std::size_t l = 0; l < n_labelsets; ++l) {
    ReachLog reach(n);
    for (std::size_t w = 0; w < jobs; ++w) reach.merge(shards[w][l]);
    union_reach.merge(reach);
    const std::size_t pruned = rep_cost(prune_to_reach(model.rep, reach), cfg);

    EfficiencyEntry e;
    if (!out.node_evals[l].empty()) e = aggregate(out.node_evals[l], pruned, cfg);
    e.rep_cost_pruned = pruned;
    e.labelset = (*ctx.eval_labels)[l].name;
    e.nodes_skipped = skipped[l];
    e.rep_cost_full = full_cost;
    e.reach = reach.size();
    out.per_labelset.push_back(std::move(e));
    all_nodes.insert(all_nodes.end(), out.node_evals[l].begin(), out.node_evals[l].end());
  }

  const std::size_t pooled_cost = rep_cost(prune_to_reach(model.rep, union_reach), cfg);
  if (!all_nodes.empty()) out.pooled = aggregate(all_nodes, pooled_cost, cfg);
  out.pooled.rep_cost_pruned = pooled_cost;
  out.pooled.labelset = "*";
  out.pooled.rep_cost_full = full_cost;
  out.pooled.reach = union_reach.size();
  for (auto s : skipped) out.pooled.nodes_skipped += s;
  return out;
}

std::vector<double> pooled_efficiencies(std::span<const ModelResult> models) {
  std::vector<double> e;
  for (const auto& m : models) e.push_back(m.pooled.efficiency);
  return e;
}

std::size_t select_model(std::span<const ModelResult> models) {
  if (models.empty()) throw InvalidArgument("no models to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < models.size(); ++i)
    if (models[i].pooled.efficiency > models[best].pooled.efficiency) best = i;
  return best;
}

void rescore(EfficiencyTable& table, double lambda) {
  table.selected = select_model(table.models);
  table.significance.clear();
  if (table.models.size() >= 4) table.significance = significance_all(pooled_efficiencies(table.models), lambda);
}

EfficiencyTable evaluate_models(std::span<const ModelSpec> models, const EvalContext& ctx,
                                const EvalConfig& cfg, const TaskLearner& learner) {
  if (models.empty()) throw InvalidArgument("model roster is empty");
  EfficiencyTable table;
  for (const auto& m : models) table.models.push_back(run_model(m, ctx, cfg, learner));
  rescore(table, cfg.lambda);
  return table;
}

}  // namespace netsel
