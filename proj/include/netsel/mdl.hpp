#pragma once

// Description-length cost: canonical MessagePack bytes compressed with the LZ4 block
// format (default acceleration). The compressor is vendored, so costs are stable across
// runs, platforms and thread counts.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netsel/msgpack.hpp"
#include "netsel/queryfn.hpp"

namespace netsel::mdl {

struct CostReport {
  std::size_t raw_bytes = 0;
  std::size_t compressed_bytes = 0;
};

/// Raw and compressed sizes of serialize(v).
CostReport measure(const Value& v);

/// Compressed byte length of serialize(v).
std::size_t cost(const Value& v);

std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> block, std::size_t raw_size);

/// e.g. "lz4-block 1.9.4 acceleration=1"
std::string compressor_identity();
std::string compressor_version();
inline constexpr int kCompressorAcceleration = 1;

struct EncodeOptions {
  /// Delta-encode ascending id lists (adjacency, members, pools). Off by default.
  bool delta_ids = false;
};

/// Canonical encoding of a query representation:
///   ranked lists -> [ids...] in rank order
///   communities  -> [[members...] per community]
///   node pools   -> [ids...]
///   edge sets and ad-hoc nets -> [[out-neighbors...] per node]
Value encode_query_rep(const QueryRep& rep, const EncodeOptions& opts = {});

/// A list of forest representations, kept in the given (training) order.
Value encode_task_models(std::vector<Value> forest_reprs);

}  // namespace netsel::mdl
