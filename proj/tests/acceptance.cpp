// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//
//   acceptance [--work DIR] [--only N] [--calibrate]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "netsel/bundle.hpp"
#include "netsel/mdl.hpp"
#include "netsel/noise.hpp"
#include "netsel/pipeline.hpp"
#include "netsel/stats.hpp"
#include "netsel/taskmodel.hpp"
#include "support.hpp"

using namespace netsel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::filesystem::path g_work = std::filesystem::temp_directory_path() / "netsel_acceptance";

// ---- shared oracles

// Dense d_int: sum of element-wise minima over a dense copy of both rows.
double dense_dint(const AttributeMatrix& m, NodeId a, NodeId b) {
  std::vector<double> x(m.n_items(), 0.0), y(m.n_items(), 0.0);
  for (const auto& e : m.row(a)) x[e.item] = e.value;
  for (const auto& e : m.row(b)) y[e.item] = e.value;
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) s += std::min(x[c], y[c]);
  return s;
}

double sorted_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double plain_median(std::vector<double> v) { return sorted_quantile(std::move(v), 0.5); }

// ---- 1. KNN regularity

Outcome knn_regularity() {
  Rng rng(101);
  std::size_t bad = 0, nodes = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 20 + uniform_below(rng, 181);
    const auto m = fixture::random_matrix(rng, n, 30 + uniform_below(rng, 100), 0.02 + 0.2 * uniform01(rng));
    const std::size_t per = uniform_below(rng, std::min<std::size_t>(n - 1, 25) + 1);
    const std::size_t rho = per * n + uniform_below(rng, n);  // floor(rho / n) == per
    const auto g = build_knn(m, {rho});
    for (NodeId i = 0; i < n; ++i) bad += g.out_degree(i) != rho / n;
    nodes += n;
  }
  return {bad == 0, std::to_string(nodes) + " nodes, " + std::to_string(bad) + " off-degree"};
}

// ---- 2. Threshold exactness

Outcome threshold_exactness() {
  Rng rng(202);
  std::size_t instances = 0, mismatches = 0;
  while (instances < 200) {
    const std::size_t n = 2 + uniform_below(rng, 29);
    const std::size_t items = 5 + uniform_below(rng, 20);
    std::vector<Triplet> trip;
    for (NodeId i = 0; i < n; ++i)
      for (ItemId c = 0; c < items; ++c)
        if (bernoulli(rng, 0.5)) trip.push_back({i, c, 0.5 + uniform01(rng)});
    const auto m = AttributeMatrix::from_triplets(n, items, std::move(trip));
    struct Pair {
      double s;
      NodeId i, j;
    };
    std::vector<Pair> pairs;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) pairs.push_back({dense_dint(m, i, j), i, j});
    std::set<double> distinct;
    for (const auto& p : pairs) distinct.insert(p.s);
    if (distinct.size() != pairs.size()) continue;  // needs distinct similarities
    ++instances;
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.s > b.s; });
    const std::size_t rho = uniform_below(rng, pairs.size() + 1);
    std::vector<std::vector<NodeId>> adj(n);
    for (std::size_t p = 0; p < rho; ++p) {
      adj[pairs[p].i].push_back(pairs[p].j);
      adj[pairs[p].j].push_back(pairs[p].i);
    }
    const auto expect = EdgeSet::from_adjacency(adj);
    const auto got = build_threshold(m, {rho});
    mismatches += !(got.adjacency() == expect.adjacency()) || got.edge_count() != 2 * rho;
  }
  return {mismatches == 0, std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches"};
}

// ---- 3. Query contract

std::vector<QueryRep> reps_of_every_kind(Rng& rng, std::size_t n) {
  const auto g = fixture::random_graph(rng, n, 0.04);
  const auto m = fixture::random_matrix(rng, n, 80, 0.08);
  const std::size_t ell = std::min<std::size_t>(60, n), mm = std::min<std::size_t>(40, ell - 1);
  return {make_bfs_rep(g),
          make_cluster_rep(detect_communities(g, rng())),
          make_top_rep(QueryKind::degree_top, rank_by_degree(g, ell)),
          make_top_rep(QueryKind::activity_top, rank_by_activity(m, ell)),
          make_net_rep(QueryKind::degree_net, build_adhoc_net(rank_by_degree(g, ell), m, mm)),
          make_net_rep(QueryKind::activity_net, build_adhoc_net(rank_by_activity(m, ell), m, mm)),
          make_random_rep(n)};
}

Outcome query_contract() {
  Rng rng(303);
  std::size_t drawn = 0, declined = 0, violations = 0;
  std::map<QueryKind, std::size_t> per_kind;
  for (int graph = 0; graph < 3; ++graph) {
    const std::size_t n = 200;
    for (const auto& rep : reps_of_every_kind(rng, n)) {
      ReachLog log(n);
      for (int t = 0; t < 1000; ++t) {
        const auto i = static_cast<NodeId>(uniform_below(rng, n));
        const std::size_t k = 1 + uniform_below(rng, 39);
        auto s = try_query(rep, i, k, rng, log);
        if (!s) {
          ++declined;
          continue;
        }
        ++drawn;
        ++per_kind[rep.kind];
        const std::set<NodeId> uniq(s->members.begin(), s->members.end());
        if (s->members.size() != k || uniq.size() != k || uniq.count(i) || s->seed != i ||
            *uniq.rbegin() >= n)
          ++violations;
      }
    }
  }
  // every kind must actually have been exercised
  bool all_kinds = per_kind.size() == 7;
  for (const auto& [_, c] : per_kind) all_kinds = all_kinds && c > 500;
  std::ostringstream d;
  d << drawn << " samples (" << declined << " declined for lack of nodes), " << violations << " violations";
  return {violations == 0 && all_kinds, d.str()};
}

// ---- 4. Efficiency oracle

// Outcome is a hash of (instance, labelset, node, k, replicate); records what it sees.
class RecordingStub final : public TaskLearner {
 public:
  RecordingStub(std::uint64_t instance, std::size_t n, std::size_t n_labelsets)
      : instance_(instance), logs_(n_labelsets, ReachLog(n)) {}

  static std::uint64_t mix(std::uint64_t instance, const TaskInput& in) {
    return splitmix64(instance ^ splitmix64(in.labelset * 1000003 + in.node * 7919 + in.k * 131 + in.replicate));
  }
  static bool correct(std::uint64_t h) { return (h & 3) != 0; }
  static std::size_t cost(std::uint64_t h) { return 100 + (h >> 8) % 400; }

  TaskOutcome fit_and_predict(const TaskInput& in, Rng&) const override {
    {
      std::lock_guard lock(mu_);
      auto& log = logs_[in.labelset];
      log.touch(in.node);
      for (NodeId j : in.members) log.touch(j);
    }
    const auto h = mix(instance_, in);
    return {correct(h), cost(h)};
  }

  const ReachLog& log(std::size_t l) const { return logs_[l]; }

 private:
  std::uint64_t instance_;
  mutable std::mutex mu_;
  mutable std::vector<ReachLog> logs_;
};

Outcome efficiency_oracle() {
  Rng rng(404);
  std::size_t mismatches = 0;
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    const std::size_t n = 30 + uniform_below(rng, 40);
    const auto train = fixture::random_matrix(rng, n, 25, 0.2);
    const auto eval = fixture::random_matrix(rng, n, 25, 0.2);
    LabelCatalog labels(n);
    const std::size_t n_labelsets = 1 + uniform_below(rng, 3);
    for (std::size_t l = 0; l < n_labelsets; ++l) {
      std::vector<NodeId> pos;
      for (NodeId i = 0; i < n; ++i)
        if (bernoulli(rng, 0.2)) pos.push_back(i);
      labels.add("l" + std::to_string(l), pos);
    }
    EvalConfig cfg;
    cfg.b = 1 + uniform_below(rng, 6);
    cfg.k_grid = {3, 7, 12};
    cfg.master_seed = inst;
    cfg.include_rep_cost = inst % 4 != 3;
    cfg.jobs = 1 + inst % 3;
    const QueryRep rep = inst % 2 ? make_random_rep(n) : make_top_rep(QueryKind::activity_top, rank_by_activity(train, 20));
    const EvalContext ctx{&train, &labels, &eval, &labels};
    RecordingStub stub(inst, n, n_labelsets);
    const auto res = run_model({"m", rep}, ctx, cfg, stub);

    // brute force
    std::int64_t all_correct = 0;
    double all_cost = 0.0;
    ReachLog union_log(n);
    for (std::size_t l = 0; l < n_labelsets; ++l) {
      std::int64_t correct = 0;
      double cost = 0.0;
      for (NodeId i : labels[l].positives) {
        std::size_t best_c = 0;
        double best_med = 0.0;
        bool have = false;
        for (std::size_t k : cfg.k_grid) {
          std::size_t c = 0;
          std::vector<double> costs;
          for (std::size_t t = 0; t < cfg.b; ++t) {
            const TaskInput in{train, {}, {}, {}, i, l, k, t};
            const auto h = RecordingStub::mix(inst, in);
            c += RecordingStub::correct(h);
            costs.push_back(static_cast<double>(RecordingStub::cost(h)));
          }
          const double med = plain_median(costs);
          if (!have || static_cast<double>(c) / med > static_cast<double>(best_c) / best_med) {
            best_c = c;
            best_med = med;
            have = true;
          }
        }
        correct += static_cast<std::int64_t>(best_c);
        cost += best_med;
      }
      const auto pruned = prune_to_reach(rep, stub.log(l));
      const auto rep_cost = mdl::cost(mdl::encode_query_rep(pruned, cfg.encoding));
      const double denom = cost + (cfg.include_rep_cost ? static_cast<double>(rep_cost) : 0.0);
      const double eff = labels[l].positives.empty() ? 0.0 : static_cast<double>(correct) / denom;
      const auto& e = res.per_labelset[l];
      if (e.correct_total != correct || e.task_cost_total != cost || e.rep_cost_pruned != rep_cost ||
          e.efficiency != eff)
        ++mismatches;
      all_correct += correct;
      all_cost += cost;
      union_log.merge(stub.log(l));
    }
    const auto rep_cost = mdl::cost(mdl::encode_query_rep(prune_to_reach(rep, union_log), cfg.encoding));
    const double denom = all_cost + (cfg.include_rep_cost ? static_cast<double>(rep_cost) : 0.0);
    const double eff = denom > 0.0 ? static_cast<double>(all_correct) / denom : 0.0;
    if (res.pooled.correct_total != all_correct || res.pooled.task_cost_total != all_cost ||
        res.pooled.rep_cost_pruned != rep_cost || res.pooled.efficiency != eff)
      ++mismatches;
  }
  return {mismatches == 0, "100 stub instances, " + std::to_string(mismatches) + " mismatching entries"};
}

// ---- 5. Reach pruning

Outcome reach_pruning() {
  Rng rng(505);
  std::size_t cases = 0, larger = 0, full_mismatch = 0;
  std::ostringstream excess;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 30 + uniform_below(rng, 120);
    for (auto& rep : reps_of_every_kind(rng, n)) {
      ReachLog log(n);
      const double keep = uniform01(rng);
      for (NodeId i = 0; i < n; ++i)
        if (bernoulli(rng, keep)) log.touch(i);
      const auto full = mdl::cost(mdl::encode_query_rep(rep));
      const auto pruned = mdl::cost(mdl::encode_query_rep(prune_to_reach(rep, log)));
      if (pruned > full) {
        ++larger;
        excess << " [" << to_string(rep.kind) << ": " << pruned << " > " << full << " bytes, reach " << log.size()
               << "/" << n << "]";
      }
      const auto all = prune_to_reach(rep, ReachLog::full(n));
      full_mismatch += !(all == rep) || mdl::cost(mdl::encode_query_rep(all)) != full;
      ++cases;
    }
  }
  std::ostringstream d;
  d << cases << " (rep, reach) pairs, " << larger << " pruned costs above full, " << full_mismatch
    << " full-reach mismatches" << excess.str();
  return {larger == 0 && full_mismatch == 0, d.str()};
}

// ---- 6. Rewiring

Outcome rewiring() {
  Rng rng(606);
  std::size_t degree_bad = 0, identity_bad = 0, outside = 0, checks = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 20 + uniform_below(rng, 100);
    const auto g = fixture::random_graph(rng, n, 0.02 + 0.2 * uniform01(rng));
    const double edges = static_cast<double>(g.edge_count());
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
      const auto r = rewire_noise(g, p, rng);
      degree_bad += r.edges.out_degrees() != g.out_degrees();
      if (p == 0.0) identity_bad += !(r.edges == g);
      const double mean = edges * (1.0 - p), sigma = std::sqrt(edges * p * (1.0 - p));
      const double dev = std::abs(static_cast<double>(r.stats.retained) - mean);
      if (sigma > 0.0) worst = std::max(worst, dev / sigma);
      outside += dev > 3.0 * sigma;
      ++checks;
    }
  }
  std::ostringstream d;
  d << checks << " rewirings, " << degree_bad << " degree changes, " << identity_bad << " p=0 changes, " << outside
    << " retained counts beyond 3 sigma (worst " << worst << " sigma)";
  return {degree_bad == 0 && identity_bad == 0 && outside == 0, d.str()};
}

// ---- 7. Significance

double oracle_score(const std::vector<double>& e, std::size_t r) {
  std::vector<double> gaps, cohort;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i == r) continue;
    gaps.push_back(std::abs(e[r] - e[i]));
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (j != r) cohort.push_back(std::abs(e[i] - e[j]));
  }
  const double iqr = sorted_quantile(cohort, 0.75) - sorted_quantile(cohort, 0.25);
  if (iqr == 0.0) return 0.0;
  return (plain_median(gaps) - plain_median(cohort)) / iqr;
}

Outcome significance_check() {
  Rng rng(707);
  std::size_t wrong_flags = 0, score_off = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    // tight cohort of 7 around 0.01, one model 10x
    std::vector<double> e;
    for (int i = 0; i < 7; ++i) e.push_back(0.01 * (1.0 + 0.05 * (uniform01(rng) - 0.5)));
    const std::size_t planted = uniform_below(rng, 8);
    e.insert(e.begin() + static_cast<std::ptrdiff_t>(planted), 0.1 * (1.0 + 0.05 * (uniform01(rng) - 0.5)));
    const auto all = significance_all(e, 1.0);
    for (std::size_t r = 0; r < e.size(); ++r) {
      wrong_flags += all[r].significant != (r == planted);
      const double d = std::abs(all[r].score - oracle_score(e, r));
      worst = std::max(worst, d);
      score_off += d > 1e-12;
    }
    // uniform cohort
    const std::vector<double> flat(8, 0.02);
    for (const auto& s : significance_all(flat, 1.0)) wrong_flags += s.significant;
  }
  std::ostringstream d;
  d << "20 planted + 20 uniform cohorts, " << wrong_flags << " wrong flags, max score error " << worst;
  return {wrong_flags == 0 && score_off == 0, d.str()};
}

// ---- 8. Kendall

double pair_tau(const std::vector<double>& a, const std::vector<double>& b) {
  long c = 0, d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) ((a[i] < a[j]) == (b[i] < b[j]) ? c : d) += 1;
  return static_cast<double>(c - d) / static_cast<double>(a.size() * (a.size() - 1) / 2);
}

Outcome kendall_check() {
  std::size_t checked = 0, off = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<double> id(n), perm(n);
    std::iota(id.begin(), id.end(), 1.0);
    perm = id;
    do {
      off += kendall_tau(id, perm).tau != pair_tau(id, perm);
      ++checked;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  Rng rng(808);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + uniform_below(rng, 11);
    std::vector<double> a(n), b(n);
    std::iota(a.begin(), a.end(), 0.0);
    std::iota(b.begin(), b.end(), 0.0);
    shuffle(a, rng);
    shuffle(b, rng);
    off += kendall_tau(a, b).tau != pair_tau(a, b);
    ++checked;
  }
  std::vector<double> id(9), rev(9);
  std::iota(id.begin(), id.end(), 0.0);
  std::iota(rev.rbegin(), rev.rend(), 0.0);
  const bool ends = kendall_tau(id, id).tau == 1.0 && kendall_tau(id, rev).tau == -1.0;
  return {off == 0 && ends, std::to_string(checked) + " permutation pairs, " + std::to_string(off) + " disagreements"};
}

// ---- 9. Forest sanity

Outcome forest_sanity() {
  // pinned separable set: two features in [1, 11), class 1 above x + y = 12
  Rng data(2);
  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 200; ++i) {
    const double a = 1.0 + 10.0 * uniform01(data), b = 1.0 + 10.0 * uniform01(data);
    rows.push_back({a, b});
    y.push_back(a + b > 12.0);
  }
  Rng rng(42);
  const auto f = train_forest(TrainSet::from_dense(rows, y), {}, rng);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::vector<Entry> row = {{0, rows[i][0]}, {1, rows[i][1]}};
    ok += predict(f, row) == y[i];
  }
  const double acc = static_cast<double>(ok) / static_cast<double>(rows.size());

  std::size_t trip_bad = 0;
  Rng gen(909);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + uniform_below(gen, 80), d = 1 + uniform_below(gen, 12);
    std::vector<std::vector<double>> r(n, std::vector<double>(d, 0.0));
    std::vector<std::uint8_t> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : r[i])
        if (bernoulli(gen, 0.5)) v = static_cast<double>(uniform_below(gen, 6));
      lab[i] = bernoulli(gen, 0.5);
    }
    ForestHyper h;
    h.n_trees = 1 + uniform_below(gen, 12);
    h.max_depth = 1 + uniform_below(gen, 10);
    const auto forest = train_forest(TrainSet::from_dense(r, lab), h, gen);
    const auto repr = forest_repr(forest);
    trip_bad += !(forest_from_repr(repr) == forest) ||
                mdl::serialize(forest_repr(forest_from_repr(repr))) != mdl::serialize(repr);
  }
  std::ostringstream d;
  d << "training accuracy " << acc << ", " << trip_bad << " of 50 round trips lossy";
  return {acc >= 0.95 && trip_bad == 0, d.str()};
}

// ---- shared end-to-end setup

RunConfig planted_config(std::uint64_t seed, const std::filesystem::path& dir) {
  RunConfig c;
  SyntheticConfig s;
  s.n_nodes = 500;
  s.n_items = 1000;
  s.n_communities = 4;
  s.n_labelsets = 2;
  s.label_community_alignment = 0.9;
  s.seed = seed;
  c.synthetic = s;
  c.roster = {{"true-bfs", QueryKind::bfs, "true"},
              {"true-cluster", QueryKind::cluster, "true"},
              {"activity-top", QueryKind::activity_top, ""},
              {"random", QueryKind::random, ""}};
  c.eval.b = 10;
  c.eval.k_grid = {25, 50, 75};
  c.eval.master_seed = seed;
  c.noise_grid = {0.0, 0.5};
  c.bundle_dir = dir / "bundle";
  c.output_dir = dir / "out";
  return c;
}

// ---- 10. Determinism

Outcome determinism() {
  const auto dir = g_work / "determinism";
  std::filesystem::remove_all(dir);
  auto cfg = planted_config(7, dir);
  write_bundle(cfg);
  std::vector<std::string> dumps;
  double slowest = 0.0;
  for (std::size_t jobs : {1, 4, 1, 4}) {
    cfg.eval.jobs = jobs;
    const auto t0 = std::chrono::steady_clock::now();
    dumps.push_back(cmd_evaluate(cfg, Partition::validation, false).report.dump(2));
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  bool same = true;
  for (const auto& d : dumps) same = same && d == dumps[0];
  std::ostringstream d;
  d << "4 runs (jobs 1, 4, 1, 4), " << (same ? "byte-identical" : "reports differ") << ", slowest run " << slowest
    << " s";
  return {same && slowest < 180.0, d.str()};
}

// ---- 11 and 12. Planted-partition experiments

// Minimum relative margins, pinned at about half the smallest margin seen in the calibration
// run (--calibrate): correct 9.43, efficiency 18.2 over seeds 1..5.
constexpr double kCorrectMargin = 4.0;     // true-bfs correct over random correct
constexpr double kEfficiencyMargin = 8.0;  // best structured efficiency over random
constexpr std::uint64_t kCalibrationSeeds[] = {1, 2, 3, 4, 5};

struct PlantedRun {
  double bfs_correct = 0, random_correct = 0, bfs_eff = 0, cluster_eff = 0, random_eff = 0;
  std::string selected;
  double eff_p0 = 0, eff_p05 = 0;
};

std::map<std::uint64_t, PlantedRun> g_planted;

// Evaluation on validation, then a noise sweep of the selected model. Cached per seed.
const PlantedRun& planted(std::uint64_t seed) {
  if (auto it = g_planted.find(seed); it != g_planted.end()) return it->second;
  const auto dir = g_work / ("planted_" + std::to_string(seed));
  std::filesystem::remove_all(dir);
  auto cfg = planted_config(seed, dir);
  cfg.eval.jobs = 0;
  write_bundle(cfg);
  const Bundle bundle = load_bundle(cfg.bundle_dir);
  const ForestLearner learner(cfg.eval.hyper);
  PlantedRun r;
  const auto ev = evaluate_bundle(bundle, cfg, Partition::validation, learner);
  const auto& m = ev.table.models;
  r.bfs_correct = static_cast<double>(m[0].pooled.correct_total);
  r.random_correct = static_cast<double>(m[3].pooled.correct_total);
  r.bfs_eff = m[0].pooled.efficiency;
  r.cluster_eff = m[1].pooled.efficiency;
  r.random_eff = m[3].pooled.efficiency;
  r.selected = m[ev.table.selected].name;
  const auto sweep = noise_sweep(ev.roster.models, ev.table.selected, cfg.noise_grid, ev.table,
                                 make_context(bundle, Partition::validation), cfg.eval, learner);
  r.eff_p0 = sweep.rows[0].pooled.efficiency;
  r.eff_p05 = sweep.rows[1].pooled.efficiency;
  return g_planted[seed] = r;
}

Outcome structure_beats_random() {
  bool ok = true;
  std::ostringstream d;
  for (auto seed : kCalibrationSeeds) {
    const auto& r = planted(seed);
    const double structured = std::max(r.bfs_eff, r.cluster_eff);
    const bool pass = r.bfs_correct > r.random_correct * (1.0 + kCorrectMargin) &&
                      structured > r.random_eff * (1.0 + kEfficiencyMargin) && r.selected != "random";
    ok = ok && pass;
    d << " [seed " << seed << ": correct " << r.bfs_correct << " vs " << r.random_correct << ", E "
      << structured << " vs " << r.random_eff << ", selected " << r.selected << "]";
  }
  return {ok, "5 seeds" + d.str()};
}

Outcome noise_degrades() {
  bool ok = true;
  std::ostringstream d;
  for (auto seed : kCalibrationSeeds) {
    const auto& r = planted(seed);
    ok = ok && r.eff_p05 < r.eff_p0;
    d << " [seed " << seed << ": " << r.selected << " " << r.eff_p0 << " -> " << r.eff_p05 << "]";
  }
  return {ok, "5 seeds" + d.str()};
}

void calibrate() {
  std::cout << "seed,bfs_correct,random_correct,correct_margin,bfs_eff,cluster_eff,random_eff,eff_margin,selected,"
               "eff_p0,eff_p05\n";
  for (auto seed : kCalibrationSeeds) {
    const auto& r = planted(seed);
    const double structured = std::max(r.bfs_eff, r.cluster_eff);
    std::cout << seed << ',' << r.bfs_correct << ',' << r.random_correct << ','
              << r.bfs_correct / r.random_correct - 1.0 << ',' << r.bfs_eff << ',' << r.cluster_eff << ','
              << r.random_eff << ',' << structured / r.random_eff - 1.0 << ',' << r.selected << ',' << r.eff_p0
              << ',' << r.eff_p05 << '\n';
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool calibrate_only = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--work") && i + 1 < argc) {
      g_work = argv[++i];
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (!std::strcmp(argv[i], "--calibrate")) {
      calibrate_only = true;
    } else {
      std::cerr << "usage: acceptance [--work DIR] [--only N] [--calibrate]\n";
      return 2;
    }
  }
  std::filesystem::create_directories(g_work);
  if (calibrate_only) {
    calibrate();
    return 0;
  }

  const std::vector<Criterion> criteria = {
      {1, "knn out-degree regularity", 5, knn_regularity},
      {2, "threshold graph exactness", 5, threshold_exactness},
      {3, "query contract", 30, query_contract},
      {4, "efficiency oracle", 5, efficiency_oracle},
      {5, "reach pruning never raises cost", 10, reach_pruning},
      {6, "rewiring", 10, rewiring},
      {7, "significance", 1, significance_check},
      {8, "kendall tau", 10, kendall_check},
      {9, "forest sanity", 10, forest_sanity},
      {10, "determinism", 4 * 180, determinism},
      {11, "structured models beat random", 300, structure_beats_random},
      {12, "noise degrades the selected model", 300, noise_degrades},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << " (" << secs << " s"
              << (in_time ? "" : ", over budget") << "): " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
