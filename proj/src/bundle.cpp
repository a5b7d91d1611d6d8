#include "netsel/bundle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "netsel/error.hpp"
#include "netsel/synthetic.hpp"

namespace netsel {

using ordered_json = nlohmann::ordered_json;

std::string digest_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

const EdgeSet* Bundle::network(const std::string& name) const {
  for (const auto& [n, e] : networks)
    if (n == name) return &e;
  return nullptr;
}

namespace {

using FileMap = std::map<std::string, std::string>;

std::string events_text(std::vector<ActivityEvent> events, std::size_t n_nodes, std::size_t n_items) {
  EventLog log;
  log.events = std::move(events);
  log.n_users = n_nodes;
  log.n_items = n_items;
  std::ostringstream out;
  write_events(out, log, EventFormat::tsv, false);
  return out.str();
}

std::vector<ActivityEvent> matrix_events(const AttributeMatrix& m, std::int64_t timestamp) {
  std::vector<ActivityEvent> out;
  out.reserve(m.nnz());
  for (NodeId i = 0; i < m.n_nodes(); ++i)
    for (const auto& e : m.row(i)) out.push_back({i, e.item, e.value, timestamp});
  return out;
}

std::string labels_text(const LabelCatalog& labels) {
  ordered_json j = ordered_json::array();
  for (const auto& ls : labels.labelsets()) j.push_back({{"name", ls.name}, {"positives", ls.positives}});
  return j.dump() + "\n";
}

std::string edges_text(const EdgeSet& e) {
  std::ostringstream out;
  write_edges(out, e);
  return out.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reads "src dst" lines in raw ids and maps them to dense ids; edges touching unknown
// ids are dropped and counted.
EdgeSet load_raw_edges(const std::filesystem::path& path, const std::unordered_map<std::uint64_t, NodeId>* remap,
                       std::size_t n, std::vector<std::string>& warnings) {
  if (!std::filesystem::exists(path)) throw ConfigError("network file not found: " + path.string());
  std::istringstream in(read_file(path));
  std::vector<std::vector<NodeId>> adj(n);
  std::string line;
  std::size_t lineno = 0, unknown = 0, loops = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::uint64_t a = 0, b = 0;
    std::string rest;
    if (!(ls >> a >> b) || (ls >> rest)) throw ParseError(path.string() + ": expected 'src dst'", lineno);
    NodeId u, v;
    if (remap) {
      auto ia = remap->find(a), ib = remap->find(b);
      if (ia == remap->end() || ib == remap->end()) {
        ++unknown;
        continue;
      }
      u = ia->second;
      v = ib->second;
    } else {
      if (a >= n || b >= n) {
        ++unknown;
        continue;
      }
      u = static_cast<NodeId>(a);
      v = static_cast<NodeId>(b);
    }
    if (u == v) {
      ++loops;
      continue;
    }
    adj[u].push_back(v);
  }
  std::size_t dups = 0;
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    const auto before = l.size();
    l.erase(std::unique(l.begin(), l.end()), l.end());
    dups += before - l.size();
  }
  if (unknown) warnings.push_back(path.string() + ": dropped " + std::to_string(unknown) + " edges with unknown ids");
  if (loops) warnings.push_back(path.string() + ": dropped " + std::to_string(loops) + " self-loops");
  if (dups) warnings.push_back(path.string() + ": dropped " + std::to_string(dups) + " duplicate edges");
  return EdgeSet::from_adjacency(std::move(adj));
}

}  // namespace

IngestSummary write_bundle(const RunConfig& cfg) {
  IngestSummary summary;
  FileMap files;
  ordered_json manifest;
  manifest["format"] = "netsel-bundle";
  manifest["version"] = kBundleVersion;
  manifest["tool_version"] = NETSEL_VERSION;

  std::array<LabelCatalog, 3> labels;
  std::vector<std::pair<std::string, EdgeSet>> networks;
  std::size_t n = 0, n_items = 0;

  if (cfg.synthetic) {
    const SyntheticData data = generate_synthetic(*cfg.synthetic);
    n = cfg.synthetic->n_nodes;
    n_items = cfg.synthetic->n_items;
    manifest["source"] = "synthetic";
    manifest["seed"] = cfg.synthetic->seed;
    manifest["split"] = "generated";
    for (int p = 0; p < 3; ++p) {
      auto ev = matrix_events(data.partitions[p], p);
      summary.events[p] = ev.size();
      files[std::string(kPartitionNames[p]) + ".tsv"] = events_text(std::move(ev), n, n_items);
      labels[p] = data.labels;
    }
    networks.emplace_back("true", data.graph);
    files["communities.json"] = ordered_json(data.communities).dump() + "\n";
    for (const auto& [name, path] : cfg.networks)
      networks.emplace_back(name, load_raw_edges(path, nullptr, n, summary.warnings));
  } else {
    if (!std::filesystem::exists(cfg.events)) throw ConfigError("events file not found: " + cfg.events.string());
    if (!std::filesystem::exists(cfg.label_rules))
      throw ConfigError("label rules file not found: " + cfg.label_rules.string());
    const EventLog log = load_events(cfg.events, cfg.format, IdMapping::dense);
    n = log.n_users;
    n_items = log.n_items;
    manifest["source"] = "events";
    manifest["seed"] = nullptr;
    const TemporalSplit split = temporal_split(log, cfg.split, cfg.split_mode);

    std::unordered_map<std::uint64_t, ItemId> item_of;
    for (ItemId i = 0; i < log.item_ids.size(); ++i) item_of[log.item_ids[i]] = i;
    auto rules = load_label_rules(cfg.label_rules);
    for (auto& r : rules) {
      std::vector<ItemId> mapped;
      std::size_t unknown = 0;
      for (ItemId raw : r.items) {
        auto it = item_of.find(raw);
        if (it == item_of.end()) {
          ++unknown;
        } else {
          mapped.push_back(it->second);
        }
      }
      if (unknown)
        summary.warnings.push_back("label rule '" + r.name + "': " + std::to_string(unknown) +
                                   " items never appear in the events");
      r.items = std::move(mapped);
    }
    const std::array<const AttributeMatrix*, 3> mats{&split.validation, &split.training, &split.testing};
    for (int p = 0; p < 3; ++p) {
      summary.events[p] = split.events[p].size();
      files[std::string(kPartitionNames[p]) + ".tsv"] = events_text(split.events[p], n, n_items);
      labels[p] = derive_labels(*mats[p], rules);
    }
    manifest["split"] = {{"fractions", cfg.split},
                         {"mode", cfg.split_mode == SplitMode::by_count ? "count" : "time"},
                         {"boundaries", split.boundaries}};

    std::ostringstream users, items;
    for (std::size_t i = 0; i < log.user_ids.size(); ++i) users << i << '\t' << log.user_ids[i] << '\n';
    for (std::size_t i = 0; i < log.item_ids.size(); ++i) items << i << '\t' << log.item_ids[i] << '\n';
    files["users.tsv"] = users.str();
    files["items.tsv"] = items.str();

    std::unordered_map<std::uint64_t, NodeId> user_of;
    for (NodeId i = 0; i < log.user_ids.size(); ++i) user_of[log.user_ids[i]] = i;
    for (const auto& [name, path] : cfg.networks)
      networks.emplace_back(name, load_raw_edges(path, &user_of, n, summary.warnings));
  }

  for (int p = 0; p < 3; ++p) files[std::string("labels_") + kPartitionNames[p] + ".json"] = labels_text(labels[p]);
  std::vector<std::string> network_names;
  for (const auto& [name, edges] : networks) {
    files["networks/" + name + ".edges"] = edges_text(edges);
    network_names.push_back(name);
  }

  manifest["n_nodes"] = n;
  manifest["n_items"] = n_items;
  std::vector<std::string> labelset_names;
  for (const auto& ls : labels[0].labelsets()) labelset_names.push_back(ls.name);
  manifest["labelsets"] = labelset_names;
  manifest["networks"] = network_names;
  ordered_json digests = ordered_json::object();
  std::string all;
  for (const auto& [name, bytes] : files) {
    const auto d = digest_hex(bytes);
    digests[name] = d;
    all += name + " " + d + "\n";
  }
  manifest["files"] = digests;
  summary.digest = digest_hex(all);
  manifest["digest"] = summary.digest;

  std::filesystem::create_directories(cfg.bundle_dir / "networks");
  auto write = [&](const std::string& rel, const std::string& bytes) {
    std::ofstream out(cfg.bundle_dir / rel, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (cfg.bundle_dir / rel).string());
    out << bytes;
    if (!out) throw Error("failed writing " + (cfg.bundle_dir / rel).string());
  };
  for (const auto& [name, bytes] : files) write(name, bytes);
  write("manifest.json", manifest.dump(2) + "\n");

  summary.dir = cfg.bundle_dir;
  summary.n_nodes = n;
  summary.n_items = n_items;
  return summary;
}

Bundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw ConfigError("no bundle at " + dir.string() + " (manifest.json missing)");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bundle manifest is not valid JSON: " + std::string(e.what()));
  }
  if (manifest.value("format", std::string()) != "netsel-bundle" || manifest.value("version", 0) != kBundleVersion)
    throw ConfigError("unsupported bundle format in " + manifest_path.string());

  Bundle b;
  FileMap files;
  std::string all;
  try {
    b.n_nodes = manifest.at("n_nodes").get<std::size_t>();
    b.n_items = manifest.at("n_items").get<std::size_t>();
    for (const auto& [name, d] : manifest.at("files").items()) {
      std::string bytes = read_file(dir / name);
      if (digest_hex(bytes) != d.get<std::string>()) throw ConfigError("bundle file " + name + " fails its digest check");
      all += name + " " + d.get<std::string>() + "\n";
      files[name] = std::move(bytes);
    }
    b.digest = manifest.at("digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed bundle manifest: " + std::string(e.what()));
  }
  if (digest_hex(all) != b.digest) throw ConfigError("bundle digest mismatch");

  auto need = [&](const std::string& name) -> const std::string& {
    auto it = files.find(name);
    if (it == files.end()) throw ConfigError("bundle lacks " + name);
    return it->second;
  };
  for (int p = 0; p < 3; ++p) {
    std::istringstream in(need(std::string(kPartitionNames[p]) + ".tsv"));
    const EventLog log = parse_events(in, EventFormat::tsv, IdMapping::identity);
    for (const auto& e : log.events)
      if (e.user >= b.n_nodes || e.item >= b.n_items) throw ConfigError("bundle event id out of range");
    b.partitions[p] = aggregate_events(log.events, b.n_nodes, b.n_items);

    const auto lj = nlohmann::json::parse(need(std::string("labels_") + kPartitionNames[p] + ".json"));
    b.labels[p] = LabelCatalog(b.n_nodes);
    for (const auto& ls : lj) {
      auto pos = ls.at("positives").get<std::vector<NodeId>>();
      for (NodeId i : pos)
        if (i >= b.n_nodes) throw ConfigError("bundle label id out of range");
      b.labels[p].add(ls.at("name").get<std::string>(), std::move(pos));
    }
  }
  for (const auto& name : manifest.at("networks")) {
    const auto nm = name.get<std::string>();
    std::istringstream in(need("networks/" + nm + ".edges"));
    b.networks.emplace_back(nm, parse_edges(in, b.n_nodes).edges);
  }
  return b;
}

}  // namespace netsel
