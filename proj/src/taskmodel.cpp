#include "netsel/taskmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "netsel/error.hpp"

namespace netsel {

TrainSet TrainSet::from_sample(const AttributeMatrix& matrix, std::span<const NodeId> members,
                               std::span<const std::uint8_t> label_mask) {
  TrainSet out;
  for (NodeId j : members)
    for (const auto& e : matrix.row(j)) out.feature_map.push_back(e.item);
  std::sort(out.feature_map.begin(), out.feature_map.end());
  out.feature_map.erase(std::unique(out.feature_map.begin(), out.feature_map.end()),
                        out.feature_map.end());

  out.features.reserve(members.size());
  out.targets.reserve(members.size());
  for (NodeId j : members) {
    std::vector<Entry> row;
    row.reserve(matrix.activity(j));
    auto it = out.feature_map.begin();
    for (const auto& e : matrix.row(j)) {
      it = std::lower_bound(it, out.feature_map.end(), e.item);
      row.push_back({static_cast<ItemId>(it - out.feature_map.begin()), e.value});
    }
    out.features.push_back(std::move(row));
    out.targets.push_back(label_mask[j] ? 1 : 0);
  }
  return out;
}

TrainSet TrainSet::from_dense(const std::vector<std::vector<double>>& rows,
                              std::vector<std::uint8_t> targets) {
  if (rows.size() != targets.size()) throw InvalidArgument("rows and targets differ in length");
  TrainSet out;
  std::size_t d = 0;
  for (const auto& r : rows) d = std::max(d, r.size());
  out.feature_map.resize(d);
  std::iota(out.feature_map.begin(), out.feature_map.end(), ItemId{0});
  for (const auto& r : rows) {
    std::vector<Entry> row;
    for (std::size_t c = 0; c < r.size(); ++c)
      if (r[c] != 0.0) row.push_back({static_cast<ItemId>(c), r[c]});
    out.features.push_back(std::move(row));
  }
  for (auto& t : targets) t = t ? 1 : 0;
  out.targets = std::move(targets);
  return out;
}

std::size_t DecisionTree::depth() const {
  if (left.empty()) return 0;
  std::vector<std::size_t> d(left.size(), 0);
  std::size_t best = 0;
  // children always follow their parent
  for (std::size_t n = 0; n < left.size(); ++n) {
    best = std::max(best, d[n]);
    if (left[n] >= 0) {
      d[static_cast<std::size_t>(left[n])] = d[n] + 1;
      d[static_cast<std::size_t>(right[n])] = d[n] + 1;
    }
  }
  return best;
}

namespace {

struct Group {
  double v;
  std::int64_t pos;
  std::int64_t neg;
};

// Sum of squared class weights over total weight is the Gini "purity"; a split is
// better when sL/WL + sR/WR is larger. Weights are integer bootstrap counts, so all
// comparisons are done exactly in integers.
__extension__ using i128 = __int128;

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool greater_than(const Fraction& o) const {
    return static_cast<i128>(num) * o.den > static_cast<i128>(o.num) * den;
  }
};

Fraction split_score(std::int64_t lp, std::int64_t ln, std::int64_t rp, std::int64_t rn) {
  const std::int64_t wl = lp + ln, wr = rp + rn;
  const std::int64_t sl = lp * lp + ln * ln, sr = rp * rp + rn * rn;
  return {sl * wr + sr * wl, wl * wr};
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainSet& data, const std::vector<std::vector<std::pair<std::uint32_t, double>>>& cols,
              const ForestHyper& hyper, std::size_t mtry)
      : data_(data), cols_(cols), hyper_(hyper), mtry_(mtry),
        weight_(data.size(), 0), stamp_(data.size(), 0), value_(data.size(), 0.0) {}

  DecisionTree build(Rng& tree_rng) {
    for (std::size_t s = 0; s < data_.size(); ++s) ++weight_[uniform_below(tree_rng, data_.size())];
    const std::uint64_t node_seed = tree_rng();
    std::vector<std::uint32_t> rows;
    for (std::uint32_t r = 0; r < data_.size(); ++r)
      if (weight_[r] > 0) rows.push_back(r);
    tree_ = DecisionTree{};
    grow(rows, 0, splitmix64(node_seed));
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    Fraction score;
  };

  std::int32_t add_node() {
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(-1.0);
    tree_.value.push_back(-1);
    return static_cast<std::int32_t>(tree_.left.size() - 1);
  }

  std::int32_t grow(const std::vector<std::uint32_t>& rows, std::size_t depth, std::uint64_t key) {
    const std::int32_t id = add_node();
    std::int64_t pos = 0, neg = 0;
    for (auto r : rows) (data_.targets[r] ? pos : neg) += weight_[r];

    Split split;
    if (depth < hyper_.max_depth && pos > 0 && neg > 0 &&
        pos + neg >= 2 * static_cast<std::int64_t>(hyper_.min_leaf)) {
      Rng rng(key);
      split = find_split(rows, pos, neg, rng);
    }
    if (!split.found) {
      tree_.value[id] = pos > neg ? 1 : 0;
      return id;
    }

    ++serial_;
    for (auto r : rows) {
      stamp_[r] = serial_;
      value_[r] = 0.0;
    }
    for (const auto& [r, v] : cols_[static_cast<std::size_t>(split.feature)])
      if (stamp_[r] == serial_) value_[r] = v;
    std::vector<std::uint32_t> lrows, rrows;
    for (auto r : rows) (value_[r] <= split.threshold ? lrows : rrows).push_back(r);

    tree_.feature[id] = split.feature;
    tree_.threshold[id] = split.threshold;
    const std::int32_t l = grow(lrows, depth + 1, splitmix64(key * 2 + 1));
    const std::int32_t r = grow(rrows, depth + 1, splitmix64(key * 2 + 2));
    tree_.left[id] = l;
    tree_.right[id] = r;
    return id;
  }

  // Visits features in random order until mtry non-constant ones have been scored or
  // all features are exhausted.
  Split find_split(const std::vector<std::uint32_t>& rows, std::int64_t pos, std::int64_t neg, Rng& rng) {
    ++serial_;
    for (auto r : rows) stamp_[r] = serial_;
    const Fraction parent{pos * pos + neg * neg, pos + neg};

    Split best;
    std::size_t d = cols_.size();
    order_.resize(d);
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    std::size_t scored = 0;
    std::vector<Group> groups;
    for (std::size_t t = 0; t < d && scored < mtry_; ++t) {
      const std::size_t pick = t + uniform_below(rng, d - t);
      std::swap(order_[t], order_[pick]);
      const std::uint32_t f = order_[t];

      groups.clear();
      std::int64_t nz_pos = 0, nz_neg = 0;
      for (const auto& [r, v] : cols_[f]) {
        if (stamp_[r] != serial_) continue;
        const std::int64_t w = weight_[r];
        const bool y = data_.targets[r] != 0;
        groups.push_back({v, y ? w : 0, y ? 0 : w});
        (y ? nz_pos : nz_neg) += w;
      }
      if (nz_pos + nz_neg < pos + neg) groups.push_back({0.0, pos - nz_pos, neg - nz_neg});
      std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.v < b.v; });
      if (groups.empty() || groups.front().v == groups.back().v) continue;  // constant here
      ++scored;

      std::int64_t lp = 0, ln = 0;
      for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        lp += groups[g].pos;
        ln += groups[g].neg;
        if (groups[g].v == groups[g + 1].v) continue;
        const std::int64_t rp = pos - lp, rn = neg - ln;
        const auto min_leaf = static_cast<std::int64_t>(hyper_.min_leaf);
        if (lp + ln < min_leaf || rp + rn < min_leaf) continue;
        const Fraction s = split_score(lp, ln, rp, rn);
        if (!s.greater_than(parent)) continue;
        if (!best.found || s.greater_than(best.score)) {
          best.found = true;
          best.score = s;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = groups[g].v + (groups[g + 1].v - groups[g].v) / 2.0;
          if (!(best.threshold < groups[g + 1].v)) best.threshold = groups[g].v;  // adjacent doubles
        }
      }
    }
    return best;
  }

  const TrainSet& data_;
  const std::vector<std::vector<std::pair<std::uint32_t, double>>>& cols_;
  const ForestHyper& hyper_;
  std::size_t mtry_;
  std::vector<std::int64_t> weight_;
  std::vector<std::uint64_t> stamp_;
  std::vector<double> value_;
  std::vector<std::uint32_t> order_;
  std::uint64_t serial_ = 0;
  DecisionTree tree_;
};

}  // namespace

TrainedForest train_forest(const TrainSet& data, const ForestHyper& hyper, Rng& rng) {
  if (data.size() == 0) throw InvalidArgument("empty training set");
  if (data.features.size() != data.targets.size())
    throw InvalidArgument("features and targets differ in length");
  if (hyper.n_trees == 0) throw InvalidArgument("n_trees must be positive");
  if (hyper.min_leaf == 0) throw InvalidArgument("min_leaf must be positive");

  const std::size_t d = data.n_features();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> cols(d);
  for (std::uint32_t r = 0; r < data.size(); ++r)
    for (const auto& e : data.features[r]) {
      if (e.item >= d) throw InvalidArgument("feature index outside the feature map");
      cols[e.item].emplace_back(r, e.value);
    }
  std::size_t mtry = hyper.feature_subsample;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  mtry = std::max<std::size_t>(1, std::min(mtry, std::max<std::size_t>(d, 1)));

  TrainedForest forest;
  forest.trees.reserve(hyper.n_trees);
  for (std::size_t t = 0; t < hyper.n_trees; ++t) {
    Rng tree_rng(rng());
    TreeBuilder builder(data, cols, hyper, mtry);
    forest.trees.push_back(builder.build(tree_rng));
  }

  // keep only the items some split uses
  std::vector<std::int32_t> remap(d, -1);
  for (const auto& tree : forest.trees)
    for (auto f : tree.feature)
      if (f >= 0) remap[static_cast<std::size_t>(f)] = 0;
  std::int32_t next = 0;
  for (std::size_t f = 0; f < d; ++f)
    if (remap[f] == 0) {
      remap[f] = next++;
      forest.feature_map.push_back(data.feature_map[f]);
    }
  for (auto& tree : forest.trees)
    for (auto& f : tree.feature)
      if (f >= 0) f = remap[static_cast<std::size_t>(f)];
  return forest;
}

int tree_predict(const DecisionTree& tree, const TrainedForest& forest, SparseRow row) {
  std::size_t n = 0;
  while (tree.left[n] >= 0) {
    const ItemId item = forest.feature_map[static_cast<std::size_t>(tree.feature[n])];
    n = static_cast<std::size_t>(lookup(row, item) <= tree.threshold[n] ? tree.left[n] : tree.right[n]);
  }
  return tree.value[n];
}

std::size_t positive_votes(const TrainedForest& forest, SparseRow row) {
  std::size_t votes = 0;
  for (const auto& tree : forest.trees) votes += tree_predict(tree, forest, row) == 1 ? 1 : 0;
  return votes;
}

int predict(const TrainedForest& forest, SparseRow row) {
  return 2 * positive_votes(forest, row) > forest.n_trees() ? 1 : 0;
}

mdl::Value forest_repr(const TrainedForest& forest) {
  mdl::Value::List trees;
  trees.reserve(forest.trees.size());
  for (const auto& t : forest.trees) {
    mdl::Value::List thresholds;
    thresholds.reserve(t.threshold.size());
    for (double x : t.threshold) thresholds.emplace_back(x);
    trees.push_back(mdl::Value(mdl::Value::List{mdl::int_list(t.left), mdl::int_list(t.right),
                                                 mdl::int_list(t.feature), mdl::Value(std::move(thresholds)),
                                                 mdl::int_list(t.value)}));
  }
  return mdl::Value(mdl::Value::List{mdl::int_list(forest.feature_map), mdl::Value(std::move(trees))});
}

namespace {

const mdl::Value::List& expect_list(const mdl::Value& v, const char* what) {
  if (!v.is_list()) throw InvalidArgument(std::string("forest repr: expected a list for ") + what);
  return v.as_list();
}

template <typename T>
std::vector<T> ints(const mdl::Value& v, const char* what) {
  std::vector<T> out;
  for (const auto& x : expect_list(v, what)) {
    if (!x.is_int()) throw InvalidArgument(std::string("forest repr: non-integer in ") + what);
    const auto i = x.as_int();
    if (i < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
        i > static_cast<std::int64_t>(std::numeric_limits<T>::max()))
      throw InvalidArgument(std::string("forest repr: value out of range in ") + what);
    out.push_back(static_cast<T>(i));
  }
  return out;
}

}  // namespace

TrainedForest forest_from_repr(const mdl::Value& repr) {
  const auto& top = expect_list(repr, "forest");
  if (top.size() != 2) throw InvalidArgument("forest repr: expected [feature_map, trees]");
  TrainedForest forest;
  forest.feature_map = ints<ItemId>(top[0], "feature_map");
  for (const auto& tv : expect_list(top[1], "trees")) {
    const auto& parts = expect_list(tv, "tree");
    if (parts.size() != 5) throw InvalidArgument("forest repr: a tree has five lists");
    DecisionTree t;
    t.left = ints<std::int32_t>(parts[0], "left");
    t.right = ints<std::int32_t>(parts[1], "right");
    t.feature = ints<std::int32_t>(parts[2], "feature");
    for (const auto& x : expect_list(parts[3], "threshold")) {
      if (!x.is_real()) throw InvalidArgument("forest repr: non-real threshold");
      t.threshold.push_back(x.as_real());
    }
    t.value = ints<std::int32_t>(parts[4], "value");
    forest.trees.push_back(std::move(t));
  }
  validate(forest);
  return forest;
}

void validate(const TrainedForest& forest) {
  if (forest.trees.empty()) throw InvalidArgument("forest has no trees");
  const auto d = static_cast<std::int64_t>(forest.feature_map.size());
  for (const auto& t : forest.trees) {
    const std::size_t n = t.left.size();
    if (n == 0 || t.right.size() != n || t.feature.size() != n || t.threshold.size() != n ||
        t.value.size() != n)
      throw InvalidArgument("tree lists differ in length");
    for (std::size_t i = 0; i < n; ++i) {
      const bool leaf = t.left[i] < 0;
      if (leaf) {
        if (t.left[i] != -1 || t.right[i] != -1 || t.feature[i] != -1 ||
            (t.value[i] != 0 && t.value[i] != 1))
          throw InvalidArgument("malformed leaf");
      } else {
        const auto si = static_cast<std::int64_t>(i), sn = static_cast<std::int64_t>(n);
        if (t.left[i] <= si || t.left[i] >= sn || t.right[i] <= si || t.right[i] >= sn ||
            t.feature[i] < 0 || t.feature[i] >= d || t.value[i] != -1)
          throw InvalidArgument("malformed internal node");
      }
    }
  }
}

}  // namespace netsel
