// netsel: select a network representation by task efficiency.
//
//   netsel ingest   --config run.json
//   netsel evaluate --config run.json --partition validation
//   netsel select   --validation out/evaluation_validation.json --test out/evaluation_test.json
//   netsel noise    --config run.json
//   netsel report   out/evaluation_validation.json
//
// Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netsel/bundle.hpp"
#include "netsel/config.hpp"
#include "netsel/error.hpp"
#include "netsel/pipeline.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> b;
  std::optional<std::string> k_grid;
  std::optional<std::string> rho_dense;
  std::optional<std::string> rho_sparse;
  std::optional<double> lambda;
  std::optional<std::string> noise_grid;
  std::optional<std::size_t> jobs;
  std::optional<std::string> bundle;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed for every random stream");
  cmd->add_option("--b", o.b, "Replicates per (node, k)");
  cmd->add_option("--k-grid", o.k_grid, "Sample sizes, e.g. 25,50,75");
  cmd->add_option("--rho-dense", o.rho_dense, "Edges of the dense networks: N, density:X or edges_of:NAME");
  cmd->add_option("--rho-sparse", o.rho_sparse, "Edges of the sparse networks");
  cmd->add_option("--lambda", o.lambda, "Significance threshold");
  cmd->add_option("--noise-grid", o.noise_grid, "Rewiring probabilities, e.g. 0,0.25,0.5");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores); results do not depend on it");
  cmd->add_option("--bundle", o.bundle, "Bundle directory (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory (overrides the config)");
}

netsel::RunConfig load(const std::string& path, const Overrides& o) {
  netsel::RunConfig cfg = netsel::load_run_config(path);
  if (o.seed) cfg.eval.master_seed = *o.seed;
  if (o.b) cfg.eval.b = *o.b;
  if (o.k_grid) cfg.eval.k_grid = netsel::parse_size_list(*o.k_grid);
  if (o.rho_dense) cfg.rho_dense = netsel::parse_rho(*o.rho_dense);
  if (o.rho_sparse) cfg.rho_sparse = netsel::parse_rho(*o.rho_sparse);
  if (o.lambda) cfg.eval.lambda = *o.lambda;
  if (o.noise_grid) cfg.noise_grid = netsel::parse_real_list(*o.noise_grid);
  if (o.jobs) cfg.eval.jobs = *o.jobs;
  if (o.bundle) cfg.bundle_dir = *o.bundle;
  if (o.out) cfg.output_dir = *o.out;
  netsel::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network model selection by task efficiency"};
  app.set_version_flag("--version", std::string(NETSEL_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* ingest = app.add_subcommand("ingest", "Load or generate data, split it and write a dataset bundle");
  ingest->add_option("--config", config_path, "Run configuration (JSON)")->required();
  std::optional<std::string> ingest_bundle;
  ingest->add_option("--bundle", ingest_bundle, "Bundle directory (overrides the config)");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate every roster model on one partition");
  evaluate->add_option("--config", config_path, "Run configuration (JSON)")->required();
  std::string partition = "validation";
  evaluate->add_option("--partition", partition, "validation or test");
  add_overrides(evaluate, ov);

  auto* select = app.add_subcommand("select", "Compare validation and test evaluations");
  std::string val_path, test_path, select_out;
  double select_lambda = 1.0;
  select->add_option("--validation", val_path, "Validation evaluation report")->required();
  select->add_option("--test", test_path, "Test evaluation report")->required();
  select->add_option("--lambda", select_lambda, "Significance threshold");
  select->add_option("--out", select_out, "Where to write the selection report");

  auto* noise = app.add_subcommand("noise", "Rewire significant models and re-evaluate them");
  noise->add_option("--config", config_path, "Run configuration (JSON)")->required();
  std::vector<std::string> noise_models;
  noise->add_option("--model", noise_models, "Sweep these models instead of the significant ones");
  add_overrides(noise, ov);

  auto* report = app.add_subcommand("report", "Print a summary of a report file");
  std::string report_path;
  report->add_option("file", report_path, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      auto cfg = netsel::load_run_config(config_path);
      if (ingest_bundle) cfg.bundle_dir = *ingest_bundle;
      const auto s = netsel::write_bundle(cfg);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "bundle " << s.dir.string() << "\n  nodes " << s.n_nodes << ", items " << s.n_items
                << "\n  events " << s.events[0] << " / " << s.events[1] << " / " << s.events[2]
                << " (validation / training / testing)\n  digest " << s.digest << '\n';
    } else if (*evaluate) {
      const auto cfg = load(config_path, ov);
      const auto ev = netsel::cmd_evaluate(cfg, netsel::parse_partition(partition));
      std::cout << netsel::render_summary(ev.report);
    } else if (*select) {
      const auto j = netsel::cmd_select(val_path, test_path, select_lambda, select_out);
      std::cout << netsel::render_summary(j);
    } else if (*noise) {
      const auto cfg = load(config_path, ov);
      const auto run = netsel::cmd_noise(cfg, noise_models);
      std::cout << netsel::render_summary(run.report);
    } else if (*report) {
      std::cout << netsel::render_summary(netsel::read_json(report_path));
    }
  } catch (const netsel::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const netsel::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
