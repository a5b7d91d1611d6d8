#pragma once

// Activity ingestion, sparse attribute matrices, label derivation and the
// temporal validation/training/testing split.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace netsel {

using NodeId = std::uint32_t;
using ItemId = std::uint32_t;

struct ActivityEvent {
  NodeId user = 0;
  ItemId item = 0;
  double value = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const ActivityEvent&, const ActivityEvent&) = default;
};

/// One stored (item, value) pair of a sparse attribute row.
struct Entry {
  ItemId item = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

using SparseRow = std::span<const Entry>;

struct Triplet {
  NodeId node = 0;
  ItemId item = 0;
  double value = 0.0;
};

/// Value of `item` in a sorted sparse row, 0 when absent.
double lookup(SparseRow row, ItemId item);

/// Per-node sparse nonnegative activity vectors in CSR layout. Rows are sorted by
/// item id, carry no duplicate items, and store strictly positive values only.
class AttributeMatrix {
 public:
  AttributeMatrix() = default;
  AttributeMatrix(std::size_t n_nodes, std::size_t n_items);

  /// Sums duplicate (node, item) triplets and drops zero totals.
  static AttributeMatrix from_triplets(std::size_t n_nodes, std::size_t n_items,
                                       std::vector<Triplet> triplets);

  std::size_t n_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t n_items() const noexcept { return n_items_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  SparseRow row(NodeId i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Number of non-zero attributes of node i.
  std::size_t activity(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  double value(NodeId i, ItemId item) const { return lookup(row(i), item); }
  double row_sum(NodeId i) const;

  friend bool operator==(const AttributeMatrix&, const AttributeMatrix&) = default;

 private:
  std::size_t n_items_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Entry> entries_;
};

enum class EventFormat { tsv, csv };

/// How raw ids in an events file become dense ids.
enum class IdMapping {
  dense,     ///< ascending raw id order mapped onto 0..n-1
  identity,  ///< raw ids used as-is; n = max id + 1
};

/// Parsed events plus the tables mapping dense ids back to raw ids.
struct EventLog {
  std::vector<ActivityEvent> events;
  std::vector<std::uint64_t> user_ids;  // dense -> raw
  std::vector<std::uint64_t> item_ids;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
};

EventFormat parse_event_format(const std::string& name);

EventLog parse_events(std::istream& in, EventFormat format, IdMapping mapping = IdMapping::dense);
EventLog load_events(const std::filesystem::path& path, EventFormat format,
                     IdMapping mapping = IdMapping::dense);

/// Writes events with raw ids (when the log has mapping tables) or dense ids.
void write_events(std::ostream& out, const EventLog& log, EventFormat format, bool raw_ids = true);

/// Aggregates events into a matrix by summing values per (user, item).
AttributeMatrix aggregate_events(std::span<const ActivityEvent> events, std::size_t n_nodes,
                                 std::size_t n_items);

enum class SplitMode {
  by_count,  ///< cut at event-count quantiles
  by_time,   ///< cut at fractions of the covered time span
};

struct TemporalSplit {
  AttributeMatrix validation;
  AttributeMatrix training;
  AttributeMatrix testing;
  /// Events per partition, in timestamp order.
  std::array<std::vector<ActivityEvent>, 3> events;
  /// Last timestamp of the validation and of the training partition (INT64_MIN when empty).
  std::array<std::int64_t, 2> boundaries{};
};

/// Splits events into contiguous validation < training < testing partitions. Events
/// sharing a timestamp with the last event before a cut stay in the earlier partition.
TemporalSplit temporal_split(const EventLog& log, std::array<double, 3> fractions,
                             SplitMode mode = SplitMode::by_count);

struct Labelset {
  std::string name;
  std::vector<NodeId> positives;  // ascending

  friend bool operator==(const Labelset&, const Labelset&) = default;
};

/// Binary labelsets over a fixed node universe.
class LabelCatalog {
 public:
  LabelCatalog() = default;
  explicit LabelCatalog(std::size_t n_nodes) : n_nodes_(n_nodes) {}

  /// Positives are sorted and deduplicated; ids must be < n_nodes.
  void add(std::string name, std::vector<NodeId> positives);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t size() const noexcept { return sets_.size(); }
  const Labelset& operator[](std::size_t l) const { return sets_[l]; }
  const std::vector<Labelset>& labelsets() const noexcept { return sets_; }

  /// Dense 0/1 membership vector of labelset l.
  std::span<const std::uint8_t> mask(std::size_t l) const { return masks_[l]; }
  bool is_positive(std::size_t l, NodeId i) const { return masks_[l][i] != 0; }

  /// Removes labelsets without positives; returns how many were dropped.
  std::size_t drop_empty();

  friend bool operator==(const LabelCatalog& a, const LabelCatalog& b) {
    return a.n_nodes_ == b.n_nodes_ && a.sets_ == b.sets_;
  }

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Labelset> sets_;
  std::vector<std::vector<std::uint8_t>> masks_;
};

/// A node is positive when at least `min_items` of `items` have value >= `min_value_per_item`.
struct LabelRule {
  std::string name;
  std::vector<ItemId> items;
  double min_value_per_item = 5.0;
  std::size_t min_items = 5;
};

LabelCatalog derive_labels(const AttributeMatrix& matrix, std::span<const LabelRule> rules);

/// Reads a JSON array of {name, items, min_value_per_item, min_items}.
std::vector<LabelRule> load_label_rules(const std::filesystem::path& path);
std::vector<LabelRule> parse_label_rules(const std::string& json_text);

}  // namespace netsel
