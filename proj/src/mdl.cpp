#include "netsel/mdl.hpp"

#include <limits>

#include "lz4.h"
#include "netsel/error.hpp"

namespace netsel::mdl {

std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > static_cast<std::size_t>(LZ4_MAX_INPUT_SIZE))
    throw InvalidArgument("object too large for LZ4 block compression");
  const int src_size = static_cast<int>(bytes.size());
  std::vector<std::uint8_t> out(static_cast<std::size_t>(LZ4_compressBound(src_size)));
  const int n = LZ4_compress_fast(reinterpret_cast<const char*>(bytes.data()),
                                  reinterpret_cast<char*>(out.data()), src_size,
                                  static_cast<int>(out.size()), kCompressorAcceleration);
  if (n <= 0) throw Error("LZ4 compression failed");
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> block, std::size_t raw_size) {
  std::vector<std::uint8_t> out(raw_size);
  const int n = LZ4_decompress_safe(reinterpret_cast<const char*>(block.data()),
                                    reinterpret_cast<char*>(out.data()),
                                    static_cast<int>(block.size()), static_cast<int>(raw_size));
  if (n < 0 || static_cast<std::size_t>(n) != raw_size) throw Error("LZ4 decompression failed");
  return out;
}

std::string compressor_version() { return LZ4_versionString(); }

std::string compressor_identity() {
  return "lz4-block " + compressor_version() + " acceleration=" +
         std::to_string(kCompressorAcceleration);
}

CostReport measure(const Value& v) {
  const auto raw = serialize(v);
  return {raw.size(), compress_block(raw).size()};
}

std::size_t cost(const Value& v) { return measure(v).compressed_bytes; }

namespace {

Value sorted_ids(std::span<const NodeId> ids, const EncodeOptions& opts) {
  Value::List out;
  out.reserve(ids.size());
  NodeId prev = 0;
  for (NodeId id : ids) {
    out.emplace_back(opts.delta_ids ? static_cast<std::int64_t>(id) - prev : id);
    prev = id;
  }
  return Value(std::move(out));
}

Value nested(const std::vector<std::vector<NodeId>>& lists, const EncodeOptions& opts) {
  Value::List out;
  out.reserve(lists.size());
  for (const auto& l : lists) out.push_back(sorted_ids(l, opts));
  return Value(std::move(out));
}

}  // namespace

Value encode_query_rep(const QueryRep& rep, const EncodeOptions& opts) {
  validate(rep);
  return std::visit(
      [&](const auto& p) -> Value {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EdgeSet>) {
          return nested(p.adjacency(), opts);
        } else if constexpr (std::is_same_v<T, CommunityMap>) {
          return nested(p.all_members(), opts);
        } else if constexpr (std::is_same_v<T, RankedList>) {
          return int_list(p.ids);
        } else if constexpr (std::is_same_v<T, AdHocNet>) {
          return nested(p.out, opts);
        } else {
          return sorted_ids(p.ids, opts);
        }
      },
      rep.payload);
}

Value encode_task_models(std::vector<Value> forest_reprs) { return Value(std::move(forest_reprs)); }

}  // namespace netsel::mdl
