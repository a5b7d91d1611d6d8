#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "netsel/error.hpp"
#include "netsel/mdl.hpp"
#include "netsel/msgpack.hpp"
#include "support.hpp"

using namespace netsel;
using mdl::Value;

namespace {

// Minimal MessagePack reader for the subset the encoder emits, written from the wire format
// tables rather than from the encoder.
class Decoder {
 public:
  explicit Decoder(const std::vector<std::uint8_t>& b) : b_(b) {}

  Value read() {
    const std::uint8_t t = next();
    if (t <= 0x7f) return Value(std::int64_t{t});
    if (t >= 0xe0) return Value(std::int64_t{static_cast<std::int8_t>(t)});
    if ((t & 0xf0) == 0x90) return list(t & 0x0f);
    switch (t) {
      case 0xcc: return Value(static_cast<std::int64_t>(be(1)));
      case 0xcd: return Value(static_cast<std::int64_t>(be(2)));
      case 0xce: return Value(static_cast<std::int64_t>(be(4)));
      case 0xcf: return Value(static_cast<std::int64_t>(be(8)));
      case 0xd0: return Value(std::int64_t{static_cast<std::int8_t>(be(1))});
      case 0xd1: return Value(std::int64_t{static_cast<std::int16_t>(be(2))});
      case 0xd2: return Value(std::int64_t{static_cast<std::int32_t>(be(4))});
      case 0xd3: return Value(static_cast<std::int64_t>(be(8)));
      case 0xcb: return Value(std::bit_cast<double>(be(8)));
      case 0xdc: return list(be(2));
      case 0xdd: return list(be(4));
    }
    throw std::runtime_error("unexpected type byte");
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::uint8_t next() {
    if (pos_ >= b_.size()) throw std::runtime_error("truncated");
    return b_[pos_++];
  }
  std::uint64_t be(int n) {
    std::uint64_t x = 0;
    for (int i = 0; i < n; ++i) x = (x << 8) | next();
    return x;
  }
  Value list(std::uint64_t n) {
    Value::List items;
    for (std::uint64_t i = 0; i < n; ++i) items.push_back(read());
    return Value(std::move(items));
  }

  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

Value decode(const std::vector<std::uint8_t>& bytes) {
  Decoder d(bytes);
  Value v = d.read();
  EXPECT_TRUE(d.done());
  return v;
}

std::vector<std::uint8_t> bytes_of(const Value& v) { return mdl::serialize(v); }

Value random_value(Rng& rng, int depth) {
  const auto pick = uniform_below(rng, depth > 0 ? 4 : 3);
  if (pick == 0) return Value(static_cast<std::int64_t>(rng()));
  if (pick == 1) return Value(static_cast<std::int64_t>(uniform_below(rng, 300)) - 150);
  if (pick == 2) return Value(uniform01(rng) * 1e6 - 5e5);
  Value::List items;
  const auto n = uniform_below(rng, 20);
  for (std::uint64_t i = 0; i < n; ++i) items.push_back(random_value(rng, depth - 1));
  return Value(std::move(items));
}

}  // namespace

TEST(Serialize, EmptyListIsFixarrayZero) {
  EXPECT_EQ(bytes_of(Value::List{}), (std::vector<std::uint8_t>{0x90}));
}

TEST(Serialize, MinimalIntegerWidths) {
  EXPECT_EQ(bytes_of(0), (std::vector<std::uint8_t>{0x00}));
  EXPECT_EQ(bytes_of(127), (std::vector<std::uint8_t>{0x7f}));
  EXPECT_EQ(bytes_of(128), (std::vector<std::uint8_t>{0xcc, 0x80}));
  EXPECT_EQ(bytes_of(256), (std::vector<std::uint8_t>{0xcd, 0x01, 0x00}));
  EXPECT_EQ(bytes_of(-1), (std::vector<std::uint8_t>{0xff}));
  EXPECT_EQ(bytes_of(-32), (std::vector<std::uint8_t>{0xe0}));
  EXPECT_EQ(bytes_of(-33), (std::vector<std::uint8_t>{0xd0, 0xdf}));
  EXPECT_EQ(bytes_of(70000).size(), 5u);
  EXPECT_EQ(bytes_of(std::int64_t{1} << 40).size(), 9u);
  EXPECT_EQ(bytes_of(1.5), (std::vector<std::uint8_t>{0xcb, 0x3f, 0xf8, 0, 0, 0, 0, 0, 0}));
}

TEST(Serialize, ListHeaders) {
  Value::List sixteen(16, Value(1));
  auto b = bytes_of(sixteen);
  EXPECT_EQ(b[0], 0xdc);
  EXPECT_EQ(b.size(), 3u + 16u);
  Value::List big(70000, Value(0));
  EXPECT_EQ(bytes_of(big)[0], 0xdd);
}

TEST(Serialize, Errors) {
  EXPECT_THROW(bytes_of(std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_THROW(bytes_of(std::nan("")), InvalidArgument);
  EXPECT_THROW(Value(std::numeric_limits<std::uint64_t>::max()), InvalidArgument);
}

TEST(Serialize, Deterministic) {
  Rng rng(1);
  auto v = random_value(rng, 3);
  const auto first = bytes_of(v);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(bytes_of(v), first);
}

TEST(Serialize, RandomIntsRoundTripThroughDecoder) {
  Rng rng(2);
  Value::List ints;
  for (int i = 0; i < 1000; ++i) {
    const int shift = static_cast<int>(uniform_below(rng, 64));
    ints.emplace_back(static_cast<std::int64_t>(rng() >> shift) * (bernoulli(rng, 0.5) ? 1 : -1));
  }
  Value v(ints);
  EXPECT_EQ(decode(bytes_of(v)), v);
}

TEST(Serialize, NestedRoundTripAndInjective) {
  Rng rng(3);
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<Value> values;
  for (int t = 0; t < 300; ++t) {
    auto v = random_value(rng, 3);
    EXPECT_EQ(decode(bytes_of(v)), v);
    bool duplicate = false;
    for (const auto& w : values) duplicate |= w == v;
    if (!duplicate) {
      values.push_back(v);
      EXPECT_TRUE(seen.insert(bytes_of(v)).second);
    }
  }
  // an int and the equal real must not collide
  EXPECT_NE(bytes_of(1), bytes_of(1.0));
}

TEST(Compress, BlockRoundTrip) {
  Rng rng(4);
  std::vector<std::uint8_t> raw(5000);
  for (auto& b : raw) b = static_cast<std::uint8_t>(uniform_below(rng, 8));
  auto block = mdl::compress_block(raw);
  EXPECT_EQ(mdl::decompress_block(block, raw.size()), raw);
  EXPECT_EQ(mdl::compressor_identity(), "lz4-block " + mdl::compressor_version() + " acceleration=1");
}

TEST(Cost, DeterministicAndPositive) {
  Rng rng(5);
  auto v = random_value(rng, 3);
  const auto c = mdl::cost(v);
  EXPECT_GE(c, 1u);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(mdl::cost(v), c);
  EXPECT_EQ(mdl::cost(Value::List{}), mdl::compress_block(bytes_of(Value::List{})).size());
}

TEST(Cost, RepetitiveListCompresses) {
  Value::List same(10000, Value(1234));
  auto r = mdl::measure(Value(same));
  EXPECT_EQ(r.raw_bytes, 3u + 10000u * 3u);
  EXPECT_LT(r.compressed_bytes * 10, r.raw_bytes);
}

TEST(Cost, RandomCostsAtLeastConstant) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Value::List random, constant;
    for (int i = 0; i < 2000; ++i) {
      random.emplace_back(static_cast<std::int64_t>(uniform_below(rng, 1u << 20)));
      constant.emplace_back(std::int64_t{1u << 19});
    }
    EXPECT_GE(mdl::cost(Value(random)), mdl::cost(Value(constant)));
  }
}

TEST(Encode, EmptyEdgeSetShape) {
  auto v = mdl::encode_query_rep(make_bfs_rep(EdgeSet(3)));
  EXPECT_EQ(v, Value(Value::List{Value::List{}, Value::List{}, Value::List{}}));
}

TEST(Encode, KindSpecificForms) {
  auto ranked = mdl::encode_query_rep(make_top_rep(QueryKind::degree_top, RankedList{{5, 2, 9}, 3}));
  EXPECT_EQ(ranked, mdl::int_list(std::vector<int>{5, 2, 9}));

  std::vector<std::uint32_t> assign = {0, 1, 0, 1};
  auto comm = mdl::encode_query_rep(make_cluster_rep(CommunityMap::from_assignment(assign)));
  EXPECT_EQ(comm, Value(Value::List{mdl::int_list(std::vector<int>{0, 2}), mdl::int_list(std::vector<int>{1, 3})}));

  auto pool = mdl::encode_query_rep(make_random_rep(4));
  EXPECT_EQ(pool, mdl::int_list(std::vector<int>{0, 1, 2, 3}));

  auto g = EdgeSet::from_adjacency({{1, 2}, {}, {0}});
  EXPECT_EQ(mdl::encode_query_rep(make_bfs_rep(g)),
            Value(Value::List{mdl::int_list(std::vector<int>{1, 2}), Value::List{}, mdl::int_list(std::vector<int>{0})}));
}

TEST(Encode, DeltaOptionShrinksSortedLists) {
  std::vector<std::vector<NodeId>> adj(301);
  adj[0] = {100, 200, 300};
  auto rep = make_bfs_rep(EdgeSet::from_adjacency(adj));
  auto plain = mdl::encode_query_rep(rep);
  auto delta = mdl::encode_query_rep(rep, {.delta_ids = true});
  EXPECT_EQ(plain.as_list()[0], mdl::int_list(std::vector<int>{100, 200, 300}));
  EXPECT_EQ(delta.as_list()[0], mdl::int_list(std::vector<int>{100, 100, 100}));
  // rank order is not sorted order, so ranked lists are left alone
  auto ranked = make_top_rep(QueryKind::activity_top, RankedList{{9, 3, 7}, 3});
  EXPECT_EQ(mdl::encode_query_rep(ranked, {.delta_ids = true}), mdl::int_list(std::vector<int>{9, 3, 7}));
}

TEST(Encode, PrunedNeverLongerThanFull) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 20 + uniform_below(rng, 40);
    auto g = fixture::random_graph(rng, n, 0.1);
    auto m = fixture::random_matrix(rng, n, 30, 0.2);
    auto ranked = rank_by_activity(m, 10);
    std::vector<QueryRep> reps = {make_bfs_rep(g), make_cluster_rep(detect_communities(g, t)),
                                  make_top_rep(QueryKind::activity_top, ranked),
                                  make_net_rep(QueryKind::activity_net, build_adhoc_net(ranked, m, 4)),
                                  make_random_rep(n)};
    ReachLog log(n);
    const double keep = uniform01(rng);
    for (NodeId i = 0; i < n; ++i)
      if (bernoulli(rng, keep)) log.touch(i);
    for (const auto& rep : reps) {
      auto pruned = prune_to_reach(rep, log);
      EXPECT_LE(mdl::measure(mdl::encode_query_rep(pruned)).raw_bytes,
                mdl::measure(mdl::encode_query_rep(rep)).raw_bytes)
          << to_string(rep.kind);
    }
  }
}

TEST(Encode, RankedListCheaperThanEdgeList) {
  Rng rng(7);
  const std::size_t n = 500;
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    while (adj[i].size() < 10) {
      auto j = static_cast<NodeId>(uniform_below(rng, n));
      if (j != i && std::find(adj[i].begin(), adj[i].end(), j) == adj[i].end()) adj[i].push_back(j);
    }
  }
  auto g = EdgeSet::from_adjacency(adj);
  ASSERT_EQ(g.edge_count(), 5000u);
  auto top = make_top_rep(QueryKind::degree_top, rank_by_degree(g, 50));
  EXPECT_LT(mdl::cost(mdl::encode_query_rep(top)), mdl::cost(mdl::encode_query_rep(make_bfs_rep(g))));
}
