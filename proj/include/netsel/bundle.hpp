#pragma once

// Dataset bundle: the three activity partitions, their labels and any explicit networks,
// all in dense ids, with a manifest of per-file digests.
//
//   manifest.json
//   validation.tsv training.tsv testing.tsv     user item value timestamp
//   labels_validation.json ...                  [{"name": ..., "positives": [...]}]
//   networks/<name>.edges                        "src dst" lines
//   communities.json                             synthetic only
//   users.tsv items.tsv                          dense -> raw id maps, events only

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netsel/config.hpp"
#include "netsel/data.hpp"
#include "netsel/netmodel.hpp"

namespace netsel {

inline constexpr int kBundleVersion = 1;
inline constexpr const char* kPartitionNames[3] = {"validation", "training", "testing"};

struct Bundle {
  std::size_t n_nodes = 0;
  std::size_t n_items = 0;
  std::array<AttributeMatrix, 3> partitions;
  std::array<LabelCatalog, 3> labels;
  std::vector<std::pair<std::string, EdgeSet>> networks;
  std::string digest;  // hex

  const EdgeSet* network(const std::string& name) const;
};

struct IngestSummary {
  std::filesystem::path dir;
  std::string digest;
  std::size_t n_nodes = 0;
  std::size_t n_items = 0;
  std::array<std::size_t, 3> events{};
  std::vector<std::string> warnings;
};

/// Loads or generates the data named by the config, splits it, derives labels and writes
/// the bundle to cfg.bundle_dir. Same config, same bytes.
IngestSummary write_bundle(const RunConfig& cfg);

/// Reads a bundle and verifies every file digest.
Bundle load_bundle(const std::filesystem::path& dir);

/// 16 hex digits of FNV-1a over the bytes.
std::string digest_hex(const std::string& bytes);

}  // namespace netsel
