#include <gtest/gtest.h>

#include <algorithm>

#include "netsel/error.hpp"
#include "netsel/mdl.hpp"
#include "netsel/taskmodel.hpp"
#include "support.hpp"

using namespace netsel;

namespace {

std::vector<Entry> sparse(const std::vector<double>& dense) {
  std::vector<Entry> row;
  for (std::size_t c = 0; c < dense.size(); ++c)
    if (dense[c] != 0.0) row.push_back({static_cast<ItemId>(c), dense[c]});
  return row;
}

// Independent traversal over global item ids.
int walk(const DecisionTree& t, const std::vector<ItemId>& fmap, const std::vector<double>& dense) {
  std::size_t n = 0;
  while (t.left[n] >= 0) {
    const ItemId item = fmap[static_cast<std::size_t>(t.feature[n])];
    const double x = item < dense.size() ? dense[item] : 0.0;
    n = static_cast<std::size_t>(x <= t.threshold[n] ? t.left[n] : t.right[n]);
  }
  return t.value[n];
}

struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> targets;
};

// Two features in [1, 11); class 1 above the line x + y = 12.
Dataset separable(std::uint64_t seed, std::size_t n = 200) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 1.0 + 10.0 * uniform01(rng), y = 1.0 + 10.0 * uniform01(rng);
    d.rows.push_back({x, y});
    d.targets.push_back(x + y > 12.0 ? 1 : 0);
  }
  return d;
}

Dataset noisy(std::uint64_t seed, std::size_t n, std::size_t d) {
  Rng rng(seed);
  Dataset out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d, 0.0);
    for (auto& v : row)
      if (bernoulli(rng, 0.4)) v = static_cast<double>(1 + uniform_below(rng, 5));
    out.targets.push_back(row[0] + row[1] > 4.0 || bernoulli(rng, 0.15) ? 1 : 0);
    out.rows.push_back(std::move(row));
  }
  return out;
}

double accuracy(const TrainedForest& f, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    auto row = sparse(d.rows[i]);
    ok += predict(f, row) == d.targets[i];
  }
  return static_cast<double>(ok) / static_cast<double>(d.rows.size());
}

std::size_t element_count(const mdl::Value& v) {
  if (!v.is_list()) return 1;
  std::size_t n = 0;
  for (const auto& x : v.as_list()) n += element_count(x);
  return n;
}

// True when every split of `a` sits at the same place in `b`.
bool is_prefix(const DecisionTree& a, const std::vector<ItemId>& fa, const DecisionTree& b,
               const std::vector<ItemId>& fb, std::size_t na = 0, std::size_t nb = 0) {
  if (a.left[na] < 0) return true;
  if (b.left[nb] < 0) return false;
  if (fa[static_cast<std::size_t>(a.feature[na])] != fb[static_cast<std::size_t>(b.feature[nb])] ||
      a.threshold[na] != b.threshold[nb])
    return false;
  return is_prefix(a, fa, b, fb, static_cast<std::size_t>(a.left[na]), static_cast<std::size_t>(b.left[nb])) &&
         is_prefix(a, fa, b, fb, static_cast<std::size_t>(a.right[na]), static_cast<std::size_t>(b.right[nb]));
}

DecisionTree leaf(int value) { return {{-1}, {-1}, {-1}, {-1.0}, {value}}; }

}  // namespace

TEST(Forest, ConstantTargetsGiveSingleLeaves) {
  auto d = noisy(1, 30, 6);
  std::fill(d.targets.begin(), d.targets.end(), 1);
  Rng rng(1);
  auto f = train_forest(TrainSet::from_dense(d.rows, d.targets), {}, rng);
  ASSERT_EQ(f.n_trees(), 10u);
  for (const auto& t : f.trees) {
    EXPECT_EQ(t.n_nodes(), 1u);
    EXPECT_EQ(t.value[0], 1);
  }
  EXPECT_TRUE(f.feature_map.empty());
  EXPECT_EQ(predict(f, sparse({9, 9, 9})), 1);
}

TEST(Forest, SeparableTrainingAccuracy) {
  auto d = separable(2);
  Rng rng(42);
  auto f = train_forest(TrainSet::from_dense(d.rows, d.targets), {}, rng);
  EXPECT_GE(accuracy(f, d), 0.95);
}

TEST(Forest, DeterministicGivenSeed) {
  auto d = noisy(3, 60, 12);
  auto ts = TrainSet::from_dense(d.rows, d.targets);
  Rng a(9), b(9);
  auto fa = train_forest(ts, {}, a);
  auto fb = train_forest(ts, {}, b);
  EXPECT_EQ(fa, fb);
  EXPECT_EQ(mdl::serialize(forest_repr(fa)), mdl::serialize(forest_repr(fb)));
}

TEST(Forest, RespectsHyperparameters) {
  auto d = noisy(4, 120, 10);
  auto ts = TrainSet::from_dense(d.rows, d.targets);
  ForestHyper h;
  h.n_trees = 7;
  h.max_depth = 3;
  Rng rng(4);
  auto f = train_forest(ts, h, rng);
  EXPECT_EQ(f.n_trees(), 7u);
  for (const auto& t : f.trees) EXPECT_LE(t.depth(), 3u);
  EXPECT_NO_THROW(validate(f));
  EXPECT_TRUE(std::is_sorted(f.feature_map.begin(), f.feature_map.end()));
}

TEST(Forest, RejectsEmptyTrainingSet) {
  Rng rng(5);
  EXPECT_THROW(train_forest(TrainSet{}, {}, rng), InvalidArgument);
  ForestHyper h;
  h.n_trees = 0;
  auto d = noisy(5, 10, 3);
  EXPECT_THROW(train_forest(TrainSet::from_dense(d.rows, d.targets), h, rng), InvalidArgument);
}

TEST(Forest, TiedVotePredictsZero) {
  TrainedForest f;
  f.trees = {leaf(1), leaf(0), leaf(1), leaf(0)};
  EXPECT_EQ(positive_votes(f, {}), 2u);
  EXPECT_EQ(predict(f, {}), 0);
  f.trees.push_back(leaf(1));
  EXPECT_EQ(predict(f, {}), 1);
}

TEST(Forest, VotesMatchTraversalOracle) {
  auto d = noisy(6, 80, 15);
  Rng rng(6);
  auto f = train_forest(TrainSet::from_dense(d.rows, d.targets), {}, rng);
  Rng inputs(60);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(20, 0.0);  // wider than the training universe on purpose
    for (auto& v : x)
      if (bernoulli(inputs, 0.5)) v = static_cast<double>(uniform_below(inputs, 6));
    auto row = sparse(x);
    std::size_t votes = 0;
    for (const auto& tree : f.trees) {
      const int w = walk(tree, f.feature_map, x);
      EXPECT_EQ(tree_predict(tree, f, row), w);
      votes += w == 1;
    }
    EXPECT_EQ(positive_votes(f, row), votes);
    EXPECT_EQ(predict(f, row), 2 * votes > f.n_trees() ? 1 : 0);
  }
}

TEST(Forest, TreeOrderDoesNotChangePrediction) {
  auto d = noisy(7, 80, 10);
  Rng rng(7);
  auto f = train_forest(TrainSet::from_dense(d.rows, d.targets), {}, rng);
  auto g = f;
  std::reverse(g.trees.begin(), g.trees.end());
  for (const auto& r : d.rows) EXPECT_EQ(predict(f, sparse(r)), predict(g, sparse(r)));
}

TEST(Forest, SampleFeatureMapUsesItemIds) {
  // items 100 and 200 only; labels follow item 200
  std::vector<Triplet> t;
  std::vector<std::uint8_t> mask(40, 0);
  std::vector<NodeId> members;
  for (NodeId i = 0; i < 40; ++i) {
    members.push_back(i);
    t.push_back({i, 100, 1.0 + (i % 3)});
    if (i % 2) {
      t.push_back({i, 200, 5.0});
      mask[i] = 1;
    }
  }
  auto m = AttributeMatrix::from_triplets(40, 300, t);
  auto ts = TrainSet::from_sample(m, members, mask);
  EXPECT_EQ(ts.feature_map, (std::vector<ItemId>{100, 200}));
  Rng rng(8);
  auto f = train_forest(ts, {}, rng);
  for (ItemId item : f.feature_map) EXPECT_TRUE(item == 100 || item == 200);
  for (NodeId i = 0; i < 40; ++i) EXPECT_EQ(predict(f, m.row(i)), mask[i]);
}

TEST(Repr, RoundTripsOnRandomForests) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto d = noisy(100 + s, 20 + s, 3 + s % 9);
    ForestHyper h;
    h.n_trees = 1 + s % 6;
    h.max_depth = 1 + s % 8;
    Rng rng(s);
    auto f = train_forest(TrainSet::from_dense(d.rows, d.targets), h, rng);
    auto repr = forest_repr(f);
    EXPECT_EQ(forest_from_repr(repr), f);
    // and through the wire format
    EXPECT_EQ(mdl::serialize(forest_repr(forest_from_repr(repr))), mdl::serialize(repr));
  }
}

TEST(Repr, SingleLeafShape) {
  TrainedForest f;
  f.trees = {leaf(1)};
  using mdl::Value;
  Value expect(Value::List{Value::List{},
                           Value::List{Value::List{Value::List{-1}, Value::List{-1}, Value::List{-1},
                                                   Value::List{-1.0}, Value::List{1}}}});
  EXPECT_EQ(forest_repr(f), expect);
}

TEST(Repr, MalformedInputRejected) {
  using mdl::Value;
  EXPECT_THROW(forest_from_repr(Value(3)), InvalidArgument);
  EXPECT_THROW(forest_from_repr(Value(Value::List{Value::List{}})), InvalidArgument);
  // child index pointing back at the root
  Value bad(Value::List{Value::List{7},
                        Value::List{Value::List{Value::List{0}, Value::List{0}, Value::List{0},
                                                Value::List{0.5}, Value::List{-1}}}});
  EXPECT_THROW(forest_from_repr(bad), InvalidArgument);
}

TEST(Repr, DeeperForestNeverShorterThanDepthOne) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto d = noisy(200 + s, 60, 8);
    auto ts = TrainSet::from_dense(d.rows, d.targets);
    ForestHyper shallow, deep;
    shallow.max_depth = 1;
    deep.max_depth = 2 + s % 7;
    Rng r1(s), r2(s);
    auto f1 = train_forest(ts, shallow, r1);
    auto fd = train_forest(ts, deep, r2);
    EXPECT_GE(element_count(forest_repr(fd)), element_count(forest_repr(f1)));
  }
}

TEST(Forest, ShallowForestIsTruncatedDeepForest) {
  auto d = noisy(9, 100, 10);
  auto ts = TrainSet::from_dense(d.rows, d.targets);
  ForestHyper h1, h8;
  h1.max_depth = 1;
  Rng r1(3), r8(3);
  auto f1 = train_forest(ts, h1, r1);
  auto f8 = train_forest(ts, h8, r8);
  for (std::size_t t = 0; t < f1.n_trees(); ++t) {
    const auto& a = f1.trees[t];
    const auto& b = f8.trees[t];
    if (a.is_leaf(0)) {
      EXPECT_TRUE(b.is_leaf(0));
      continue;
    }
    ASSERT_FALSE(b.is_leaf(0));
    EXPECT_EQ(f1.feature_map[static_cast<std::size_t>(a.feature[0])],
              f8.feature_map[static_cast<std::size_t>(b.feature[0])]);
    EXPECT_EQ(a.threshold[0], b.threshold[0]);
  }
}

TEST(Forest, EachDepthIsPrefixOfTheNext) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto d = noisy(300 + s, 80, 8);
    auto ts = TrainSet::from_dense(d.rows, d.targets);
    TrainedForest prev;
    for (std::size_t depth = 1; depth <= 8; ++depth) {
      ForestHyper h;
      h.max_depth = depth;
      Rng rng(s);
      auto f = train_forest(ts, h, rng);
      if (depth > 1)
        for (std::size_t t = 0; t < f.n_trees(); ++t)
          EXPECT_TRUE(is_prefix(prev.trees[t], prev.feature_map, f.trees[t], f.feature_map))
              << "seed " << s << " depth " << depth << " tree " << t;
      prev = std::move(f);
    }
  }
}

TEST(Forest, DeeperNeverLowersTrainingAccuracy) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto d = noisy(300 + s, 80, 8);
    auto ts = TrainSet::from_dense(d.rows, d.targets);
    double prev = 0.0;
    for (std::size_t depth = 1; depth <= 8; ++depth) {
      ForestHyper h;
      h.max_depth = depth;
      Rng rng(s);
      const double acc = accuracy(train_forest(ts, h, rng), d);
      EXPECT_GE(acc, prev) << "seed " << s << " depth " << depth;
      prev = acc;
    }
  }
}
