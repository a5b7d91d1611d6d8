#include "netsel/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "netsel/error.hpp"
#include "netsel/mdl.hpp"
#include "netsel/stats.hpp"

namespace netsel {

Partition parse_partition(const std::string& name) {
  if (name == "validation") return Partition::validation;
  if (name == "test" || name == "testing") return Partition::testing;
  throw ConfigError("unknown partition '" + name + "' (expected validation or test)");
}

std::string_view to_string(Partition p) { return p == Partition::validation ? "validation" : "test"; }

std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

Roster build_roster(const Bundle& bundle, const RunConfig& cfg) {
  Roster r;
  const std::size_t n = bundle.n_nodes;
  const AttributeMatrix& train = bundle.partitions[1];
  r.ell = effective_ell(cfg, n);
  r.m = effective_m(cfg, r.ell);

  std::vector<std::pair<std::string, std::size_t>> edge_counts;
  for (const auto& [name, e] : bundle.networks) edge_counts.emplace_back(name, e.edge_count());

  std::map<std::string, EdgeSet> cache;
  auto network = [&](const std::string& name) -> const EdgeSet& {
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    NetworkInfo info{name, 0, 0};
    EdgeSet e;
    if (const EdgeSet* stored = bundle.network(name)) {
      e = *stored;
    } else {
      const bool dense = name == "knn_dense" || name == "th_dense";
      const bool knn = name.rfind("knn_", 0) == 0;
      if (!dense && name != "knn_sparse" && name != "th_sparse")
        throw ConfigError("network '" + name + "' is not in the bundle");
      info.rho = resolve_rho(dense ? cfg.rho_dense : cfg.rho_sparse, n, edge_counts);
      e = knn ? build_knn(train, {info.rho}) : build_threshold(train, {info.rho});
    }
    info.edges = e.edge_count();
    r.networks.push_back(info);
    return cache.emplace(name, std::move(e)).first->second;
  };

  std::optional<RankedList> by_activity;
  auto activity_ranking = [&]() -> const RankedList& {
    if (!by_activity) by_activity = rank_by_activity(train, r.ell);
    return *by_activity;
  };

  for (const auto& entry : cfg.roster) {
    QueryRep rep;
    switch (entry.kind) {
      case QueryKind::bfs:
        rep = make_bfs_rep(network(entry.network));
        break;
      case QueryKind::cluster:
        rep = make_cluster_rep(
            detect_communities(network(entry.network), splitmix64(cfg.eval.master_seed ^ fnv1a(entry.network))));
        break;
      case QueryKind::degree_top:
        rep = make_top_rep(entry.kind, rank_by_degree(network(entry.network), r.ell));
        break;
      case QueryKind::activity_top:
        rep = make_top_rep(entry.kind, activity_ranking());
        break;
      case QueryKind::degree_net:
        rep = make_net_rep(entry.kind, build_adhoc_net(rank_by_degree(network(entry.network), r.ell), train, r.m));
        break;
      case QueryKind::activity_net:
        rep = make_net_rep(entry.kind, build_adhoc_net(activity_ranking(), train, r.m));
        break;
      case QueryKind::random:
        rep = make_random_rep(n);
        break;
    }
    r.models.push_back({entry.name, std::move(rep)});
  }
  return r;
}

EvalContext make_context(const Bundle& bundle, Partition p) {
  const auto idx = static_cast<std::size_t>(p);
  EvalContext ctx{&bundle.partitions[1], &bundle.labels[1], &bundle.partitions[idx], &bundle.labels[idx]};
  ctx.check();
  return ctx;
}

namespace {

ordered_json entry_json(const EfficiencyEntry& e) {
  ordered_json j;
  j["labelset"] = e.labelset;
  j["nodes_evaluated"] = e.nodes_evaluated;
  j["nodes_skipped"] = e.nodes_skipped;
  j["correct"] = e.correct_total;
  j["task_cost"] = e.task_cost_total;
  j["rep_cost_full"] = e.rep_cost_full;
  j["rep_cost"] = e.rep_cost_pruned;
  j["reach"] = e.reach;
  j["efficiency"] = e.efficiency;
  j["mean_kappa"] = e.mean_kappa;
  j["median_cost_cv"] = e.median_cost_cv;
  return j;
}

ordered_json meta_json(const Bundle& bundle, const RunConfig& cfg, std::size_t ell, std::size_t m) {
  const auto& e = cfg.eval;
  ordered_json j;
  j["tool"] = "netsel";
  j["tool_version"] = NETSEL_VERSION;
  j["compressor"] = mdl::compressor_identity();
  j["master_seed"] = e.master_seed;
  j["bundle_digest"] = bundle.digest;
  j["n_nodes"] = bundle.n_nodes;
  j["cost_aggregate"] = std::string(to_string(e.cost_aggregate));
  j["include_rep_cost"] = e.include_rep_cost;
  j["delta_ids"] = e.encoding.delta_ids;
  j["b"] = e.b;
  j["k_grid"] = e.k_grid;
  j["forest"] = {{"n_trees", e.hyper.n_trees},
                 {"max_depth", e.hyper.max_depth},
                 {"min_leaf", e.hyper.min_leaf},
                 {"feature_subsample", e.hyper.feature_subsample}};
  j["lambda"] = e.lambda;
  j["ell"] = ell;
  j["m"] = m;
  return j;
}

std::string network_of(const RunConfig& cfg, const std::string& model) {
  for (const auto& m : cfg.roster)
    if (m.name == model) return m.network;
  return {};
}

}  // namespace

ordered_json evaluation_report(const Bundle& bundle, const RunConfig& cfg, Partition p, const Roster& roster,
                               const EfficiencyTable& table) {
  ordered_json j;
  j["report"] = "evaluation";
  j["meta"] = meta_json(bundle, cfg, roster.ell, roster.m);
  j["meta"]["partition"] = std::string(to_string(p));
  ordered_json nets = ordered_json::array();
  for (const auto& n : roster.networks) {
    ordered_json nj{{"name", n.name}, {"edges", n.edges}};
    if (n.rho) nj["rho"] = n.rho;
    nets.push_back(nj);
  }
  j["networks"] = nets;

  ordered_json models = ordered_json::array();
  ordered_json significant = ordered_json::array();
  for (std::size_t i = 0; i < table.models.size(); ++i) {
    const auto& m = table.models[i];
    ordered_json mj;
    mj["name"] = m.name;
    mj["kind"] = std::string(to_string(m.kind));
    const auto net = network_of(cfg, m.name);
    mj["network"] = net.empty() ? ordered_json(nullptr) : ordered_json(net);
    mj["pooled"] = entry_json(m.pooled);
    ordered_json per = ordered_json::array();
    for (const auto& e : m.per_labelset) per.push_back(entry_json(e));
    mj["per_labelset"] = per;
    if (!table.significance.empty()) {
      const auto& s = table.significance[i];
      mj["significance"] = {{"score", s.score}, {"significant", s.significant}};
      if (s.significant) significant.push_back(m.name);
    } else {
      mj["significance"] = nullptr;
    }
    if (cfg.node_detail) {
      ordered_json nodes = ordered_json::array();
      for (std::size_t l = 0; l < m.node_evals.size(); ++l)
        for (const auto& ne : m.node_evals[l]) {
          ordered_json per_k = ordered_json::array();
          for (const auto& ks : ne.per_k)
            per_k.push_back({{"k", ks.k},
                             {"correct", ks.correct},
                             {"median_cost", ks.median_cost},
                             {"cost_at_k", ks.cost_at_k},
                             {"cost_cv", ks.cost_cv}});
          nodes.push_back({{"labelset", m.per_labelset[l].labelset},
                           {"node", ne.node},
                           {"kappa", ne.kappa()},
                           {"efficiency", ne.efficiency},
                           {"skipped_k", ne.skipped_k},
                           {"per_k", per_k}});
        }
      mj["nodes"] = nodes;
    }
    models.push_back(mj);
  }
  j["models"] = models;
  j["selected"] = table.models[table.selected].name;
  j["significant"] = significant;
  return j;
}

std::string ranking_csv(const EfficiencyTable& table) {
  std::ostringstream out;
  out << "model,correct,task_cost,rep_cost,efficiency,significance\n";
  for (std::size_t i = 0; i < table.models.size(); ++i) {
    const auto& m = table.models[i];
    out << m.name << ',' << m.pooled.correct_total << ',' << format_real(m.pooled.task_cost_total) << ','
        << m.pooled.rep_cost_pruned << ',' << format_real(m.pooled.efficiency) << ',';
    if (!table.significance.empty()) out << format_real(table.significance[i].score);
    out << '\n';
  }
  return out.str();
}

Evaluation evaluate_bundle(const Bundle& bundle, const RunConfig& cfg, Partition p, const TaskLearner& learner) {
  Evaluation ev;
  ev.roster = build_roster(bundle, cfg);
  const EvalContext ctx = make_context(bundle, p);
  ev.table = evaluate_models(ev.roster.models, ctx, cfg.eval, learner);
  ev.report = evaluation_report(bundle, cfg, p, ev.roster, ev.table);
  ev.csv = ranking_csv(ev.table);
  return ev;
}

Evaluation cmd_evaluate(const RunConfig& cfg, Partition p, bool write) {
  const Bundle bundle = load_bundle(cfg.bundle_dir);
  const ForestLearner learner(cfg.eval.hyper);
  Evaluation ev = evaluate_bundle(bundle, cfg, p, learner);
  if (write) {
    const std::string stem = "evaluation_" + std::string(to_string(p));
    write_text(cfg.output_dir / (stem + ".json"), ev.report.dump(2) + "\n");
    write_text(cfg.output_dir / (stem + ".csv"), ev.csv);
  }
  return ev;
}

namespace {

struct ModelRow {
  std::string name;
  double efficiency = 0;
  double correct = 0;
  double cost = 0;
};

std::vector<ModelRow> model_rows(const ordered_json& report, const char* which) {
  if (report.value("report", std::string()) != "evaluation")
    throw ConfigError(std::string(which) + " is not an evaluation report");
  const bool with_rep = report.at("meta").value("include_rep_cost", true);
  std::vector<ModelRow> rows;
  for (const auto& m : report.at("models")) {
    const auto& p = m.at("pooled");
    ModelRow r;
    r.name = m.at("name").get<std::string>();
    r.efficiency = p.at("efficiency").get<double>();
    r.correct = p.at("correct").get<double>();
    r.cost = p.at("task_cost").get<double>() + (with_rep ? p.at("rep_cost").get<double>() : 0.0);
    rows.push_back(r);
  }
  return rows;
}

ordered_json ratio(double a, double b) { return b != 0.0 ? ordered_json(a / b) : ordered_json(nullptr); }

ordered_json tau_json(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2) return nullptr;
  const auto t = kendall_tau(a, b);
  return {{"tau", t.tau}, {"p_value", t.p_value}};
}

ordered_json significance_json(const std::vector<ModelRow>& rows, double lambda) {
  if (rows.size() < 4) return nullptr;
  std::vector<double> e;
  for (const auto& r : rows) e.push_back(r.efficiency);
  ordered_json out = ordered_json::array();
  for (const auto& s : significance_all(e, lambda))
    out.push_back({{"model", rows[s.index].name}, {"score", s.score}, {"significant", s.significant}});
  return out;
}

}  // namespace

ordered_json select_report(const ordered_json& validation, const ordered_json& test, double lambda) {
  const auto val = model_rows(validation, "validation report");
  const auto tst = model_rows(test, "test report");
  if (val.size() != tst.size()) throw ConfigError("validation and test rosters differ");
  for (std::size_t i = 0; i < val.size(); ++i)
    if (val[i].name != tst[i].name) throw ConfigError("validation and test rosters differ");
  if (val.empty()) throw ConfigError("empty roster");

  std::vector<std::size_t> order(val.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return val[a].efficiency > val[b].efficiency; });
  std::size_t best = 0;
  for (std::size_t i = 1; i < tst.size(); ++i)
    if (tst[i].correct > tst[best].correct) best = i;

  ordered_json j;
  j["report"] = "selection";
  j["meta"] = {{"tool", "netsel"},
               {"tool_version", NETSEL_VERSION},
               {"lambda", lambda},
               {"validation_seed", validation.at("meta").at("master_seed")},
               {"test_seed", test.at("meta").at("master_seed")}};
  j["best"] = tst[best].name;
  j["selected"] = val[order[0]].name;
  ordered_json top = ordered_json::array();
  for (std::size_t r = 0; r < std::min<std::size_t>(3, order.size()); ++r) {
    const auto i = order[r];
    top.push_back({{"rank", r + 1},
                   {"model", val[i].name},
                   {"validation_efficiency", val[i].efficiency},
                   {"test_efficiency", tst[i].efficiency},
                   {"efficiency_ratio", ratio(tst[i].efficiency, tst[best].efficiency)},
                   {"cost_ratio", ratio(tst[i].cost, tst[best].cost)},
                   {"correct_ratio", ratio(tst[i].correct, tst[best].correct)}});
  }
  j["top"] = top;

  std::vector<double> ve, te, vc, tc;
  for (std::size_t i = 0; i < val.size(); ++i) {
    ve.push_back(val[i].efficiency);
    te.push_back(tst[i].efficiency);
    vc.push_back(val[i].correct);
    tc.push_back(tst[i].correct);
  }
  j["kendall"] = {{"validation_vs_test_efficiency", tau_json(ve, te)},
                  {"efficiency_vs_correct_validation", tau_json(ve, vc)},
                  {"efficiency_vs_correct_test", tau_json(te, tc)}};
  j["significance"] = {{"validation", significance_json(val, lambda)}, {"test", significance_json(tst, lambda)}};
  return j;
}

ordered_json cmd_select(const std::filesystem::path& validation, const std::filesystem::path& test, double lambda,
                        const std::filesystem::path& out_path) {
  auto j = select_report(read_json(validation), read_json(test), lambda);
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  return j;
}

NoiseRun noise_run(const Bundle& bundle, const RunConfig& cfg, const std::vector<std::string>& forced,
                   const TaskLearner& learner) {
  const Evaluation base = evaluate_bundle(bundle, cfg, Partition::validation, learner);
  const EvalContext ctx = make_context(bundle, Partition::validation);
  const auto& models = base.roster.models;

  std::vector<std::size_t> targets;
  ordered_json excluded = ordered_json::array();
  if (!forced.empty()) {
    for (const auto& name : forced) {
      auto it = std::find_if(models.begin(), models.end(), [&](const ModelSpec& m) { return m.name == name; });
      if (it == models.end()) throw ConfigError("noise: unknown model '" + name + "'");
      targets.push_back(static_cast<std::size_t>(it - models.begin()));
    }
  } else {
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (!base.table.significance.empty() && base.table.significance[i].significant) {
        targets.push_back(i);
      } else {
        excluded.push_back({{"model", models[i].name},
                            {"reason", base.table.significance.empty() ? "fewer than four models"
                                                                       : "not significant at p = 0"}});
      }
    }
  }

  NoiseRun run;
  ordered_json sweeps = ordered_json::array();
  std::ostringstream csv;
  csv << "model,p,correct,task_cost,rep_cost,efficiency,significance,significant\n";
  for (std::size_t t : targets) {
    const NoiseSweep sweep = noise_sweep(models, t, cfg.noise_grid, base.table, ctx, cfg.eval, learner);
    ordered_json rows = ordered_json::array();
    for (const auto& r : sweep.rows) {
      ordered_json rj;
      rj["p"] = r.p;
      rj["correct"] = r.pooled.correct_total;
      rj["task_cost"] = r.pooled.task_cost_total;
      rj["rep_cost"] = r.pooled.rep_cost_pruned;
      rj["efficiency"] = r.pooled.efficiency;
      rj["significance"] = r.has_significance ? ordered_json(r.significance_score) : ordered_json(nullptr);
      rj["significant"] = r.significant;
      rj["slots"] = r.stats.edges;
      rj["retained"] = r.stats.retained;
      rj["stuck"] = r.stats.stuck;
      rows.push_back(rj);
      csv << sweep.model << ',' << format_real(r.p) << ',' << r.pooled.correct_total << ','
          << format_real(r.pooled.task_cost_total) << ',' << r.pooled.rep_cost_pruned << ','
          << format_real(r.pooled.efficiency) << ',' << (r.has_significance ? format_real(r.significance_score) : "")
          << ',' << (r.significant ? "true" : "false") << '\n';
    }
    sweeps.push_back({{"model", sweep.model}, {"rows", rows}});
  }

  run.report["report"] = "noise";
  run.report["meta"] = meta_json(bundle, cfg, base.roster.ell, base.roster.m);
  run.report["meta"]["partition"] = "validation";
  run.report["grid"] = cfg.noise_grid;
  run.report["sweeps"] = sweeps;
  run.report["excluded"] = excluded;
  run.csv = csv.str();
  return run;
}

NoiseRun cmd_noise(const RunConfig& cfg, const std::vector<std::string>& forced, bool write) {
  const Bundle bundle = load_bundle(cfg.bundle_dir);
  const ForestLearner learner(cfg.eval.hyper);
  NoiseRun run = noise_run(bundle, cfg, forced, learner);
  if (write) {
    write_text(cfg.output_dir / "noise.json", run.report.dump(2) + "\n");
    write_text(cfg.output_dir / "noise.csv", run.csv);
  }
  return run;
}

namespace {

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

std::string cell(const ordered_json& v, int digits) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) return fixed(v.get<double>(), digits);
  if (v.is_number()) return std::to_string(v.get<std::int64_t>());
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  return v.get<std::string>();
}

std::string table_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) w[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(w[c])) << r[c];
      } else {
        out << std::right << std::setw(static_cast<int>(w[c])) << r[c];
      }
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

}  // namespace

std::string render_summary(const ordered_json& report) {
  const auto kind = report.value("report", std::string());
  std::ostringstream out;
  if (kind == "evaluation") {
    const auto& meta = report.at("meta");
    out << "partition " << meta.at("partition").get<std::string>() << ", seed " << meta.at("master_seed")
        << ", b " << meta.at("b") << ", compressor " << meta.at("compressor").get<std::string>() << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : report.at("models")) {
      const auto& p = m.at("pooled");
      const auto& s = m.at("significance");
      rows.push_back({m.at("name").get<std::string>(), cell(p.at("correct"), 0), cell(p.at("task_cost"), 1),
                      cell(p.at("rep_cost"), 0), cell(p.at("efficiency"), 6),
                      s.is_null() ? "-" : cell(s.at("score"), 3) + (s.at("significant").get<bool>() ? " *" : "")});
    }
    out << table_text({"model", "correct", "task_cost", "rep_cost", "efficiency", "significance"}, rows);
    out << "\nselected: " << report.at("selected").get<std::string>() << '\n';
  } else if (kind == "selection") {
    out << "selected (validation): " << report.at("selected").get<std::string>()
        << "\nbest by correct (test): " << report.at("best").get<std::string>() << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& t : report.at("top"))
      rows.push_back({cell(t.at("rank"), 0), t.at("model").get<std::string>(), cell(t.at("efficiency_ratio"), 3),
                      cell(t.at("cost_ratio"), 3), cell(t.at("correct_ratio"), 3)});
    out << table_text({"rank", "model", "E/E_best", "cost/cost_best", "correct/correct_best"}, rows);
    for (const auto& [name, tau] : report.at("kendall").items()) {
      out << "\nkendall " << name << ": ";
      if (tau.is_null()) {
        out << '-';
      } else {
        out << fixed(tau.at("tau").get<double>(), 3) << " (p " << fixed(tau.at("p_value").get<double>(), 4) << ')';
      }
    }
    out << '\n';
  } else if (kind == "noise") {
    for (const auto& s : report.at("sweeps")) {
      out << s.at("model").get<std::string>() << '\n';
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : s.at("rows"))
        rows.push_back({cell(r.at("p"), 2), cell(r.at("correct"), 0), cell(r.at("efficiency"), 6),
                        cell(r.at("significance"), 3), cell(r.at("significant"), 0)});
      out << table_text({"p", "correct", "efficiency", "significance", "significant"}, rows) << '\n';
    }
    for (const auto& e : report.at("excluded"))
      out << "excluded " << e.at("model").get<std::string>() << ": " << e.at("reason").get<std::string>() << '\n';
  } else {
    throw ConfigError("not a report written by this tool");
  }
  return out.str();
}

}  // namespace netsel
