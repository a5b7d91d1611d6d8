#include "netsel/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "netsel/noise.hpp"

namespace netsel {

using nlohmann::json;

namespace {

void only_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return (base / path).lexically_normal();
  return path;
}

RhoSpec rho_from_json(const json& j, const char* where) {
  RhoSpec r;
  if (j.is_number()) {
    if (j.get<double>() < 0 || std::floor(j.get<double>()) != j.get<double>())
      throw ConfigError(std::string(where) + ": edge count must be a non-negative integer");
    r.kind = RhoSpec::Kind::count;
    r.value = j.get<double>();
    return r;
  }
  only_keys(j, where, {"count", "density", "edges_of"});
  if (j.size() != 1) throw ConfigError(std::string(where) + ": give exactly one of count, density, edges_of");
  if (j.contains("count")) return rho_from_json(j["count"], where);
  if (j.contains("density")) {
    r.kind = RhoSpec::Kind::density;
    r.value = j["density"].get<double>();
    if (!(r.value >= 0.0 && r.value <= 1.0)) throw ConfigError(std::string(where) + ": density must lie in [0, 1]");
    return r;
  }
  r.kind = RhoSpec::Kind::edges_of;
  r.network = j["edges_of"].get<std::string>();
  return r;
}

void parse_forest(const json& j, ForestHyper& h) {
  only_keys(j, "eval.forest", {"n_trees", "max_depth", "min_leaf", "feature_subsample"});
  h.n_trees = j.value("n_trees", h.n_trees);
  h.max_depth = j.value("max_depth", h.max_depth);
  h.min_leaf = j.value("min_leaf", h.min_leaf);
  h.feature_subsample = j.value("feature_subsample", h.feature_subsample);
}

void parse_eval(const json& j, RunConfig& c) {
  only_keys(j, "eval", {"b", "k_grid", "seed", "lambda", "include_rep_cost", "cost_aggregate", "delta_ids",
                        "forest", "ell", "m", "jobs", "node_detail"});
  auto& e = c.eval;
  e.b = j.value("b", e.b);
  if (j.contains("k_grid")) e.k_grid = j["k_grid"].get<std::vector<std::size_t>>();
  e.master_seed = j.value("seed", e.master_seed);
  e.lambda = j.value("lambda", e.lambda);
  e.include_rep_cost = j.value("include_rep_cost", e.include_rep_cost);
  if (j.contains("cost_aggregate")) e.cost_aggregate = parse_cost_aggregate(j["cost_aggregate"].get<std::string>());
  e.encoding.delta_ids = j.value("delta_ids", e.encoding.delta_ids);
  if (j.contains("forest")) parse_forest(j["forest"], e.hyper);
  if (j.contains("ell")) c.ell = j["ell"].get<std::size_t>();
  if (j.contains("m")) c.m = j["m"].get<std::size_t>();
  e.jobs = j.value("jobs", e.jobs);
  c.node_detail = j.value("node_detail", c.node_detail);
}

void parse_data(const json& j, RunConfig& c, const std::filesystem::path& base) {
  only_keys(j, "data", {"synthetic", "events", "format", "label_rules", "networks"});
  if (j.contains("synthetic")) {
    if (j.contains("events")) throw ConfigError("data: give either synthetic or events, not both");
    c.synthetic = parse_synthetic_config(j["synthetic"].dump());
  } else if (j.contains("events")) {
    c.events = resolve(base, j["events"].get<std::string>());
    if (j.contains("format")) c.format = parse_event_format(j["format"].get<std::string>());
    if (!j.contains("label_rules")) throw ConfigError("data: events need label_rules");
    c.label_rules = resolve(base, j["label_rules"].get<std::string>());
  } else {
    throw ConfigError("data: give synthetic or events");
  }
  if (j.contains("networks")) {
    if (!j["networks"].is_object()) throw ConfigError("data.networks: expected an object of name: path");
    for (const auto& [name, path] : j["networks"].items())
      c.networks.emplace_back(name, resolve(base, path.get<std::string>()));
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    only_keys(j, "config", {"data", "split", "rho", "models", "eval", "noise", "bundle_dir", "output_dir"});
    if (!j.contains("data")) throw ConfigError("config: missing data section");
    parse_data(j["data"], c, base_dir);

    if (j.contains("split")) {
      const auto& s = j["split"];
      only_keys(s, "split", {"fractions", "mode"});
      if (s.contains("fractions")) {
        const auto f = s["fractions"].get<std::vector<double>>();
        if (f.size() != 3) throw ConfigError("split.fractions: expected three values");
        c.split = {f[0], f[1], f[2]};
      }
      if (s.contains("mode")) {
        const auto mode = s["mode"].get<std::string>();
        if (mode == "count") {
          c.split_mode = SplitMode::by_count;
        } else if (mode == "time") {
          c.split_mode = SplitMode::by_time;
        } else {
          throw ConfigError("split.mode: expected count or time");
        }
      }
    }
    if (j.contains("rho")) {
      only_keys(j["rho"], "rho", {"dense", "sparse"});
      if (j["rho"].contains("dense")) c.rho_dense = rho_from_json(j["rho"]["dense"], "rho.dense");
      if (j["rho"].contains("sparse")) c.rho_sparse = rho_from_json(j["rho"]["sparse"], "rho.sparse");
    }
    if (!j.contains("models") || !j["models"].is_array()) throw ConfigError("config: models must be a list");
    for (const auto& m : j["models"]) {
      only_keys(m, "models[]", {"name", "kind", "network"});
      ModelEntry e;
      e.kind = parse_query_kind(m.at("kind").get<std::string>());
      e.network = m.value("network", std::string());
      e.name = m.value("name", std::string());
      if (e.name.empty())
        e.name = e.network.empty() ? std::string(to_string(e.kind)) : e.network + "-" + std::string(to_string(e.kind));
      c.roster.push_back(std::move(e));
    }
    if (j.contains("eval")) parse_eval(j["eval"], c);
    if (j.contains("noise")) {
      only_keys(j["noise"], "noise", {"grid"});
      if (j["noise"].contains("grid")) c.noise_grid = j["noise"]["grid"].get<std::vector<double>>();
    }
    if (j.contains("bundle_dir")) c.bundle_dir = resolve(base_dir, j["bundle_dir"].get<std::string>());
    else c.bundle_dir = resolve(base_dir, c.bundle_dir.string());
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    else c.output_dir = resolve(base_dir, c.output_dir.string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

void validate(const RunConfig& c) {
  if (c.roster.empty()) throw ConfigError("model roster is empty");
  try {
    validate(c.eval);
    validate_noise_grid(c.noise_grid);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (double f : c.split)
    if (!(f >= 0.0)) throw ConfigError("split fractions must be non-negative");
  if (std::abs(c.split[0] + c.split[1] + c.split[2] - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

  std::set<std::string> names, known_networks;
  for (const auto& [name, _] : c.networks) {
    if (!known_networks.insert(name).second) throw ConfigError("duplicate network '" + name + "'");
    for (const char* s : kSimilarityNetworks)
      if (name == s) throw ConfigError("network name '" + name + "' is reserved");
  }
  if (c.synthetic) known_networks.insert("true");
  for (const char* s : kSimilarityNetworks) known_networks.insert(s);

  for (const auto& m : c.roster) {
    if (!names.insert(m.name).second) throw ConfigError("duplicate model name '" + m.name + "'");
    if (needs_network(m.kind)) {
      if (m.network.empty()) throw ConfigError("model '" + m.name + "' needs a network");
      if (!known_networks.count(m.network))
        throw ConfigError("model '" + m.name + "' uses unknown network '" + m.network + "'");
      const bool dense = m.network == "knn_dense" || m.network == "th_dense";
      const bool sparse = m.network == "knn_sparse" || m.network == "th_sparse";
      if (dense && c.rho_dense.kind == RhoSpec::Kind::unset)
        throw ConfigError("model '" + m.name + "' needs rho.dense");
      if (sparse && c.rho_sparse.kind == RhoSpec::Kind::unset)
        throw ConfigError("model '" + m.name + "' needs rho.sparse");
    } else if (!m.network.empty()) {
      throw ConfigError("model '" + m.name + "' of kind " + std::string(to_string(m.kind)) +
                        " does not take a network");
    }
  }
  for (const RhoSpec* r : {&c.rho_dense, &c.rho_sparse})
    if (r->kind == RhoSpec::Kind::edges_of && (!known_networks.count(r->network) || r->network.rfind("knn_", 0) == 0 ||
                                                r->network.rfind("th_", 0) == 0))
      throw ConfigError("rho refers to unknown or derived network '" + r->network + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != tok.size() || tok.find('-') != std::string::npos)
      throw ConfigError("not a non-negative integer list: '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != tok.size()) throw ConfigError("not a number list: '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

RhoSpec parse_rho(const std::string& text) {
  RhoSpec r;
  if (text.rfind("density:", 0) == 0) {
    r.kind = RhoSpec::Kind::density;
    r.value = parse_real_list(text.substr(8)).at(0);
    if (!(r.value >= 0.0 && r.value <= 1.0)) throw ConfigError("density must lie in [0, 1]");
  } else if (text.rfind("edges_of:", 0) == 0) {
    r.kind = RhoSpec::Kind::edges_of;
    r.network = text.substr(9);
  } else {
    r.kind = RhoSpec::Kind::count;
    r.value = static_cast<double>(parse_size_list(text).at(0));
  }
  return r;
}

std::size_t resolve_rho(const RhoSpec& rho, std::size_t n,
                        const std::vector<std::pair<std::string, std::size_t>>& edge_counts) {
  switch (rho.kind) {
    case RhoSpec::Kind::count:
      return static_cast<std::size_t>(rho.value);
    case RhoSpec::Kind::density: {
      const double pairs = static_cast<double>(n) * static_cast<double>(n - (n > 0 ? 1 : 0)) / 2.0;
      return static_cast<std::size_t>(std::llround(rho.value * pairs));
    }
    case RhoSpec::Kind::edges_of:
      for (const auto& [name, count] : edge_counts)
        if (name == rho.network) return count;
      throw ConfigError("rho refers to unknown network '" + rho.network + "'");
    case RhoSpec::Kind::unset:
      break;
  }
  throw ConfigError("rho is not set");
}

std::size_t effective_ell(const RunConfig& cfg, std::size_t n) {
  const std::size_t max_k = cfg.eval.k_grid.empty() ? 0 : cfg.eval.k_grid.back();
  const std::size_t ell = cfg.ell.value_or(std::max<std::size_t>(500, 2 * max_k));
  return std::min(ell, n);
}

std::size_t effective_m(const RunConfig& cfg, std::size_t ell) {
  const std::size_t m = cfg.m.value_or(200);
  return std::min(m, ell > 0 ? ell - 1 : 0);
}

}  // namespace netsel
