#include "netsel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json.hpp"
#include "netsel/error.hpp"
#include "netsel/rng.hpp"

namespace netsel {

void SyntheticConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument(std::string("synthetic config: ") + name + " must be in [0, 1]");
  };
  prob(intra_affinity, "intra_affinity");
  prob(label_community_alignment, "label_community_alignment");
  prob(item_affinity, "item_affinity");
  if (n_nodes < 2) throw InvalidArgument("synthetic config: n_nodes must be >= 2");
  if (n_items < 1) throw InvalidArgument("synthetic config: n_items must be >= 1");
  if (n_communities < 1 || n_communities > n_nodes)
    throw InvalidArgument("synthetic config: n_communities must be in 1..n_nodes");
  if (!(activity_skew >= 0.0) || !std::isfinite(activity_skew))
    throw InvalidArgument("synthetic config: activity_skew must be >= 0");
  if (!(mean_value >= 1.0)) throw InvalidArgument("synthetic config: mean_value must be >= 1");
  if (out_degree > n_nodes - 1)
    throw InvalidArgument("synthetic config: out_degree must be <= n_nodes - 1");
}

namespace {

struct Block {
  std::size_t start = 0;
  std::size_t size = 0;
};

Block item_block(std::size_t c, std::size_t n_communities, std::size_t n_items) {
  const std::size_t base = n_items / n_communities;
  Block b{c * base, base};
  if (c + 1 == n_communities) b.size = n_items - b.start;
  return b;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_nodes;
  const std::size_t n_comm = cfg.n_communities;
  SyntheticData data;

  // balanced community assignment
  {
    Rng rng = make_stream(cfg.seed, {1});
    data.communities.resize(n);
    for (std::size_t i = 0; i < n; ++i) data.communities[i] = static_cast<std::uint32_t>(i % n_comm);
    shuffle(data.communities, rng);
  }
  std::vector<std::vector<NodeId>> members(n_comm);
  for (NodeId i = 0; i < n; ++i) members[data.communities[i]].push_back(i);

  std::vector<std::size_t> n_active(n);
  {
    Rng rng = make_stream(cfg.seed, {2});
    const double s = cfg.activity_skew;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = s > 0.0 ? std::exp(s * standard_normal(rng) - 0.5 * s * s) : 1.0;
      const auto want = std::llround(static_cast<double>(cfg.mean_activity) * w);
      n_active[i] = static_cast<std::size_t>(std::clamp<long long>(want, 1, static_cast<long long>(cfg.n_items)));
    }
  }

  for (std::size_t p = 0; p < 3; ++p) {
    Rng rng = make_stream(cfg.seed, {3, p});
    std::vector<Triplet> triplets;
    std::unordered_set<ItemId> chosen;
    for (NodeId i = 0; i < n; ++i) {
      const Block block = item_block(data.communities[i], n_comm, cfg.n_items);
      chosen.clear();
      std::vector<ItemId> items;
      const std::size_t want = n_active[i];
      for (std::size_t attempt = 0; items.size() < want && attempt < 20 * want; ++attempt) {
        ItemId item;
        if (block.size > 0 && bernoulli(rng, cfg.item_affinity))
          item = static_cast<ItemId>(block.start + uniform_below(rng, block.size));
        else
          item = static_cast<ItemId>(uniform_below(rng, cfg.n_items));
        if (chosen.insert(item).second) items.push_back(item);
      }
      for (ItemId item = 0; items.size() < want && item < cfg.n_items; ++item)
        if (chosen.insert(item).second) items.push_back(item);
      for (ItemId item : items) {
        const double extra = -std::log1p(-uniform01(rng)) * (cfg.mean_value - 1.0);
        triplets.push_back({i, item, 1.0 + std::floor(extra)});
      }
    }
    data.partitions[p] = AttributeMatrix::from_triplets(n, cfg.n_items, std::move(triplets));
  }

  {
    Rng rng = make_stream(cfg.seed, {4});
    data.labels = LabelCatalog(n);
    const double outside =
        n_comm > 1 ? (1.0 - cfg.label_community_alignment) / static_cast<double>(n_comm - 1) : 0.0;
    for (std::size_t l = 0; l < cfg.n_labelsets; ++l) {
      const std::size_t aligned = l % n_comm;
      std::vector<NodeId> positives;
      for (NodeId i = 0; i < n; ++i) {
        const double p = data.communities[i] == aligned ? cfg.label_community_alignment : outside;
        if (bernoulli(rng, p)) positives.push_back(i);
      }
      data.labels.add("label_" + std::to_string(l), std::move(positives));
    }
  }

  {
    Rng rng = make_stream(cfg.seed, {5});
    std::vector<std::vector<NodeId>> adj(n);
    std::unordered_set<NodeId> chosen;
    for (NodeId i = 0; i < n; ++i) {
      const auto& own = members[data.communities[i]];
      chosen.clear();
      auto& out = adj[i];
      const std::size_t want = cfg.out_degree;
      for (std::size_t attempt = 0; out.size() < want && attempt < 50 * (want + 1); ++attempt) {
        NodeId j;
        if (own.size() > 1 && bernoulli(rng, cfg.intra_affinity))
          j = own[uniform_below(rng, own.size())];
        else
          j = static_cast<NodeId>(uniform_below(rng, n));
        if (j == i) continue;
        if (chosen.insert(j).second) out.push_back(j);
      }
      for (NodeId j = 0; out.size() < want && j < n; ++j)
        if (j != i && chosen.insert(j).second) out.push_back(j);
    }
    data.graph = EdgeSet::from_adjacency(std::move(adj), true);
  }
  return data;
}

SyntheticConfig parse_synthetic_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("synthetic config: expected a JSON object");
  SyntheticConfig c;
  try {
    c.n_nodes = j.value("n_nodes", c.n_nodes);
    c.n_items = j.value("n_items", c.n_items);
    c.n_communities = j.value("n_communities", c.n_communities);
    c.intra_affinity = j.value("intra_affinity", c.intra_affinity);
    c.activity_skew = j.value("activity_skew", c.activity_skew);
    c.label_community_alignment = j.value("label_community_alignment", c.label_community_alignment);
    c.seed = j.value("seed", c.seed);
    c.n_labelsets = j.value("n_labelsets", c.n_labelsets);
    c.mean_activity = j.value("mean_activity", c.mean_activity);
    c.out_degree = j.value("out_degree", c.out_degree);
    c.item_affinity = j.value("item_affinity", c.item_affinity);
    c.mean_value = j.value("mean_value", c.mean_value);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace netsel
