#pragma once

// Command implementations behind the netsel tool: build the roster from a bundle, run
// evaluations, select, sweep noise, and render reports.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "netsel/bundle.hpp"
#include "netsel/config.hpp"
#include "netsel/eval.hpp"
#include "netsel/noise.hpp"

namespace netsel {

using ordered_json = nlohmann::ordered_json;

enum class Partition { validation = 0, testing = 2 };
Partition parse_partition(const std::string& name);
std::string_view to_string(Partition p);

struct NetworkInfo {
  std::string name;
  std::size_t edges = 0;
  std::size_t rho = 0;  // requested, for similarity networks
};

struct Roster {
  std::vector<ModelSpec> models;
  std::vector<NetworkInfo> networks;  // networks some model uses, in first-use order
  std::size_t ell = 0;
  std::size_t m = 0;
};

/// Builds every roster representation. Similarity networks, rankings and ad-hoc nets come
/// from the training partition.
Roster build_roster(const Bundle& bundle, const RunConfig& cfg);

EvalContext make_context(const Bundle& bundle, Partition p);

struct Evaluation {
  Roster roster;
  EfficiencyTable table;
  ordered_json report;
  std::string csv;
};

/// Runs every roster model on the partition's positive nodes and writes
/// evaluation_<partition>.json and .csv into cfg.output_dir.
Evaluation cmd_evaluate(const RunConfig& cfg, Partition p, bool write = true);
Evaluation evaluate_bundle(const Bundle& bundle, const RunConfig& cfg, Partition p, const TaskLearner& learner);

ordered_json evaluation_report(const Bundle& bundle, const RunConfig& cfg, Partition p, const Roster& roster,
                               const EfficiencyTable& table);
std::string ranking_csv(const EfficiencyTable& table);

/// Compares a validation and a test evaluation report. Throws ConfigError when the rosters differ.
ordered_json select_report(const ordered_json& validation, const ordered_json& test, double lambda);
ordered_json cmd_select(const std::filesystem::path& validation, const std::filesystem::path& test, double lambda,
                        const std::filesystem::path& out_path);

struct NoiseRun {
  ordered_json report;
  std::string csv;
};

/// Sweeps every model flagged significant on validation, or the named models when given.
NoiseRun noise_run(const Bundle& bundle, const RunConfig& cfg, const std::vector<std::string>& forced,
                   const TaskLearner& learner);
NoiseRun cmd_noise(const RunConfig& cfg, const std::vector<std::string>& forced, bool write = true);

/// Plain-text summary of any report this tool writes.
std::string render_summary(const ordered_json& report);

ordered_json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal form.
std::string format_real(double x);

}  // namespace netsel
