#pragma once

// Efficiency pipeline: per-node sample-size choice, per-model aggregation with the
// pruned representation cost, model selection and significance.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/mdl.hpp"
#include "netsel/queryfn.hpp"
#include "netsel/rng.hpp"
#include "netsel/stats.hpp"
#include "netsel/taskmodel.hpp"

namespace netsel {

enum class CostAggregate { median, sum };
std::string_view to_string(CostAggregate a);
CostAggregate parse_cost_aggregate(std::string_view name);

struct EvalConfig {
  std::size_t b = 20;
  std::vector<std::size_t> k_grid{25, 50, 75, 100, 125, 150};
  std::uint64_t master_seed = 0;
  ForestHyper hyper;
  double lambda = 1.0;
  bool include_rep_cost = true;
  /// How the b replicate costs at kappa enter the task cost total.
  CostAggregate cost_aggregate = CostAggregate::median;
  mdl::EncodeOptions encoding;
  /// Worker threads; 0 uses the hardware concurrency. Never affects results.
  std::size_t jobs = 1;
};

/// Throws InvalidArgument unless b >= 1 and k_grid is non-empty, positive and strictly ascending.
void validate(const EvalConfig& cfg);

/// Sample attributes and labels come from the training partition; the seed node's row
/// and the positive nodes under evaluation come from the evaluated partition.
struct EvalContext {
  const AttributeMatrix* train = nullptr;
  const LabelCatalog* train_labels = nullptr;
  const AttributeMatrix* eval = nullptr;
  const LabelCatalog* eval_labels = nullptr;

  std::size_t n_nodes() const { return train->n_nodes(); }
  void check() const;
};

struct TaskInput {
  const AttributeMatrix& train;
  std::span<const std::uint8_t> train_mask;
  std::span<const NodeId> members;
  SparseRow seed_row;
  NodeId node;
  std::size_t labelset;
  std::size_t k;
  std::size_t replicate;
};

struct TaskOutcome {
  bool predicted_positive = false;
  std::size_t cost_bytes = 1;
};

/// Trains a local task model on a sample and applies it to the seed. Must be reentrant.
class TaskLearner {
 public:
  virtual ~TaskLearner() = default;
  virtual TaskOutcome fit_and_predict(const TaskInput& in, Rng& rng) const = 0;
};

class ForestLearner final : public TaskLearner {
 public:
  explicit ForestLearner(ForestHyper hyper) : hyper_(hyper) {}
  TaskOutcome fit_and_predict(const TaskInput& in, Rng& rng) const override;

 private:
  ForestHyper hyper_;
};

struct KStats {
  std::size_t k = 0;
  std::size_t correct = 0;   // in [0, b]
  double median_cost = 0.0;  // median of the b replicate costs
  double cost_at_k = 0.0;    // median or sum, per the configured aggregate
  double cost_cv = 0.0;      // coefficient of variation of the b costs (0 when b < 2)

  friend bool operator==(const KStats&, const KStats&) = default;
};

struct NodeEval {
  NodeId node = 0;
  std::vector<KStats> per_k;  // evaluated sizes, ascending
  std::vector<std::size_t> skipped_k;
  std::size_t kappa_index = 0;  // into per_k
  double efficiency = 0.0;

  const KStats& at_kappa() const { return per_k[kappa_index]; }
  std::size_t kappa() const { return at_kappa().k; }
  friend bool operator==(const NodeEval&, const NodeEval&) = default;
};

/// Index of the entry maximizing correct / median_cost; ties go to the earliest (smallest k).
std::size_t choose_kappa(std::span<const KStats> per_k);

/// Fills kappa_index and efficiency from per_k.
void finalize(NodeEval& ev);

/// Runs b replicates at every k for one positive node. Returns nullopt when every k is
/// skipped for lack of eligible nodes.
std::optional<NodeEval> evaluate_node(const QueryRep& rep, NodeId node, std::size_t labelset,
                                      const EvalContext& ctx, const EvalConfig& cfg,
                                      const TaskLearner& learner, std::uint64_t model_key,
                                      ReachLog& log);

struct EfficiencyEntry {
  std::string labelset;
  std::size_t nodes_evaluated = 0;
  std::size_t nodes_skipped = 0;
  std::int64_t correct_total = 0;
  double task_cost_total = 0.0;
  std::size_t rep_cost_full = 0;
  std::size_t rep_cost_pruned = 0;
  std::size_t reach = 0;
  double efficiency = 0.0;
  double mean_kappa = 0.0;
  double median_cost_cv = 0.0;

  friend bool operator==(const EfficiencyEntry&, const EfficiencyEntry&) = default;
};

/// Sums correct and cost at each node's kappa and divides by the total cost.
/// Throws InvalidArgument on an empty list or a zero total cost.
EfficiencyEntry aggregate(std::span<const NodeEval> nodes, std::size_t rep_cost_pruned,
                          const EvalConfig& cfg);

/// Efficiency from the stored totals.
double efficiency_of(std::int64_t correct, double task_cost, std::size_t rep_cost, bool include_rep_cost);

struct ModelSpec {
  std::string name;
  QueryRep rep;
};

struct ModelResult {
  std::string name;
  QueryKind kind = QueryKind::random;
  std::vector<EfficiencyEntry> per_labelset;
  /// Correct and cost summed across labelsets, with the rep pruned to the union reach.
  EfficiencyEntry pooled;
  std::vector<std::vector<NodeEval>> node_evals;  // per labelset

  friend bool operator==(const ModelResult&, const ModelResult&) = default;
};

/// Evaluates every positive node of every labelset. Parallel over (labelset, node);
/// identical output for any number of jobs.
ModelResult run_model(const ModelSpec& model, const EvalContext& ctx, const EvalConfig& cfg,
                      const TaskLearner& learner);
/// As above with an explicit stream key (noise sweeps reuse the untouched model's key).
ModelResult run_model(const ModelSpec& model, const EvalContext& ctx, const EvalConfig& cfg,
                      const TaskLearner& learner, std::uint64_t model_key);

struct EfficiencyTable {
  std::vector<ModelResult> models;
  /// Per model over pooled efficiencies; empty with fewer than four models.
  std::vector<SignificanceResult> significance;
  std::size_t selected = 0;
};

/// Argmax of pooled efficiency; ties go to the earlier model.
std::size_t select_model(std::span<const ModelResult> models);

EfficiencyTable evaluate_models(std::span<const ModelSpec> models, const EvalContext& ctx,
                                const EvalConfig& cfg, const TaskLearner& learner);

/// Recomputes selection and significance after entries change.
void rescore(EfficiencyTable& table, double lambda);

std::vector<double> pooled_efficiencies(std::span<const ModelResult> models);

}  // namespace netsel
