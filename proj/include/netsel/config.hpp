#pragma once

// Run configuration: one JSON document plus command-line overrides.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netsel/data.hpp"
#include "netsel/error.hpp"
#include "netsel/eval.hpp"
#include "netsel/queryfn.hpp"
#include "netsel/synthetic.hpp"

namespace netsel {

/// Raised for unusable configuration (exit code 2).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Target edge count of a similarity network: a count, a density over n(n-1)/2 pairs,
/// or the edge count of a named network.
struct RhoSpec {
  enum class Kind { unset, count, density, edges_of };
  Kind kind = Kind::unset;
  double value = 0.0;
  std::string network;
};

/// Networks a model may sit on: "true" (synthetic ground truth), any explicit network
/// name, or one of the similarity networks below, built on the training matrix.
inline constexpr const char* kSimilarityNetworks[] = {"knn_dense", "knn_sparse", "th_dense", "th_sparse"};

struct ModelEntry {
  std::string name;
  QueryKind kind = QueryKind::random;
  std::string network;  // empty for kinds without a network
};

struct RunConfig {
  std::optional<SyntheticConfig> synthetic;
  std::filesystem::path events;
  EventFormat format = EventFormat::tsv;
  std::filesystem::path label_rules;
  std::vector<std::pair<std::string, std::filesystem::path>> networks;  // explicit, raw ids

  std::array<double, 3> split{0.2, 0.6, 0.2};
  SplitMode split_mode = SplitMode::by_count;

  RhoSpec rho_dense;
  RhoSpec rho_sparse;
  std::vector<ModelEntry> roster;

  EvalConfig eval;
  std::optional<std::size_t> ell;  // default max(500, 2 * max k), clamped to |V|
  std::optional<std::size_t> m;    // default 200, clamped to ell - 1
  bool node_detail = false;        // per-node rows in evaluation reports

  std::vector<double> noise_grid{0.0, 0.25, 0.5};

  std::filesystem::path bundle_dir = "bundle";
  std::filesystem::path output_dir = "out";
};

/// Parses a config; relative paths resolve against base_dir. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Checks cross-field invariants (roster non-empty, unique names, networks known, ...).
void validate(const RunConfig& cfg);

/// Parses "25,50,75" style lists.
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
/// Parses a rho override: "1200", "density:0.01" or "edges_of:true".
RhoSpec parse_rho(const std::string& text);

/// Resolves a rho spec to an edge count for n nodes.
std::size_t resolve_rho(const RhoSpec& rho, std::size_t n_nodes, const std::vector<std::pair<std::string, std::size_t>>& edge_counts);

/// ell and m after defaults and clamping.
std::size_t effective_ell(const RunConfig& cfg, std::size_t n_nodes);
std::size_t effective_m(const RunConfig& cfg, std::size_t ell);

}  // namespace netsel
