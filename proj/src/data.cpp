#include "netsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "netsel/error.hpp"

namespace netsel {

double lookup(SparseRow row, ItemId item) {
  auto it = std::lower_bound(row.begin(), row.end(), item,
                             [](const Entry& e, ItemId id) { return e.item < id; });
  return (it != row.end() && it->item == item) ? it->value : 0.0;
}

AttributeMatrix::AttributeMatrix(std::size_t n_nodes, std::size_t n_items)
    : n_items_(n_items), offsets_(n_nodes + 1, 0) {}

AttributeMatrix AttributeMatrix::from_triplets(std::size_t n_nodes, std::size_t n_items,
                                               std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.node >= n_nodes || t.item >= n_items)
      throw InvalidArgument("triplet (" + std::to_string(t.node) + ", " + std::to_string(t.item) +
                            ") outside a " + std::to_string(n_nodes) + "x" +
                            std::to_string(n_items) + " matrix");
    if (!(t.value >= 0.0) || !std::isfinite(t.value))
      throw InvalidArgument("attribute values must be finite and nonnegative");
  }
  // stable so that duplicate sums accumulate in input order
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.node != b.node ? a.node < b.node : a.item < b.item;
  });

  AttributeMatrix m(n_nodes, n_items);
  m.entries_.reserve(triplets.size());
  std::size_t pos = 0;
  for (std::size_t node = 0; node < n_nodes; ++node) {
    while (pos < triplets.size() && triplets[pos].node == node) {
      const ItemId item = triplets[pos].item;
      double sum = 0.0;
      while (pos < triplets.size() && triplets[pos].node == node && triplets[pos].item == item)
        sum += triplets[pos++].value;
      if (sum > 0.0) m.entries_.push_back({item, sum});
    }
    m.offsets_[node + 1] = m.entries_.size();
  }
  return m;
}

double AttributeMatrix::row_sum(NodeId i) const {
  double s = 0.0;
  for (const auto& e : row(i)) s += e.value;
  return s;
}

EventFormat parse_event_format(const std::string& name) {
  if (name == "tsv") return EventFormat::tsv;
  if (name == "csv") return EventFormat::csv;
  throw InvalidArgument("unknown events format '" + name + "' (expected tsv or csv)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct RawEvent {
  std::uint64_t user;
  std::uint64_t item;
  double value;
  std::int64_t timestamp;
};

std::vector<std::uint64_t> dense_ids(std::vector<std::uint64_t> raw) {
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return raw;
}

std::uint32_t index_of(const std::vector<std::uint64_t>& ids, std::uint64_t raw) {
  return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), raw) - ids.begin());
}

}  // namespace

EventLog parse_events(std::istream& in, EventFormat format, IdMapping mapping) {
  const char delim = format == EventFormat::tsv ? '\t' : ',';
  std::vector<RawEvent> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    std::array<std::string_view, 4> fields;
    std::size_t n_fields = 0;
    std::size_t start = 0;
    while (true) {
      auto end = view.find(delim, start);
      if (n_fields < fields.size())
        fields[n_fields] = view.substr(start, end == std::string_view::npos ? end : end - start);
      ++n_fields;
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    if (n_fields != 4)
      throw ParseError("expected 4 fields (user, item, value, timestamp), found " +
                           std::to_string(n_fields),
                       line_no);

    RawEvent ev{};
    if (!parse_number(fields[0], ev.user)) throw ParseError("bad user id", line_no);
    if (!parse_number(fields[1], ev.item)) throw ParseError("bad item id", line_no);
    if (!parse_number(fields[2], ev.value) || !std::isfinite(ev.value))
      throw ParseError("bad value", line_no);
    if (ev.value < 0.0) throw ParseError("negative value", line_no);
    if (!parse_number(fields[3], ev.timestamp)) throw ParseError("unparseable timestamp", line_no);
    raw.push_back(ev);
  }

  EventLog log;
  log.events.reserve(raw.size());
  if (mapping == IdMapping::identity) {
    std::uint64_t max_user = 0, max_item = 0;
    for (const auto& r : raw) {
      if (r.user > std::numeric_limits<NodeId>::max() - 1 ||
          r.item > std::numeric_limits<ItemId>::max() - 1)
        throw ParseError("id exceeds 32-bit range");
      max_user = std::max(max_user, r.user);
      max_item = std::max(max_item, r.item);
    }
    log.n_users = raw.empty() ? 0 : max_user + 1;
    log.n_items = raw.empty() ? 0 : max_item + 1;
    for (const auto& r : raw)
      log.events.push_back({static_cast<NodeId>(r.user), static_cast<ItemId>(r.item), r.value,
                            r.timestamp});
    return log;
  }

  std::vector<std::uint64_t> users, items;
  users.reserve(raw.size());
  items.reserve(raw.size());
  for (const auto& r : raw) {
    users.push_back(r.user);
    items.push_back(r.item);
  }
  log.user_ids = dense_ids(std::move(users));
  log.item_ids = dense_ids(std::move(items));
  log.n_users = log.user_ids.size();
  log.n_items = log.item_ids.size();
  for (const auto& r : raw)
    log.events.push_back(
        {index_of(log.user_ids, r.user), index_of(log.item_ids, r.item), r.value, r.timestamp});
  return log;
}

EventLog load_events(const std::filesystem::path& path, EventFormat format, IdMapping mapping) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open events file '" + path.string() + "'");
  try {
    return parse_events(in, format, mapping);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_events(std::ostream& out, const EventLog& log, EventFormat format, bool raw_ids) {
  const char delim = format == EventFormat::tsv ? '\t' : ',';
  const bool map = raw_ids && !log.user_ids.empty();
  std::ostringstream buf;
  buf.precision(17);
  for (const auto& e : log.events) {
    const std::uint64_t u = map ? log.user_ids[e.user] : e.user;
    const std::uint64_t it = map ? log.item_ids[e.item] : e.item;
    buf << u << delim << it << delim << e.value << delim << e.timestamp << '\n';
  }
  out << buf.str();
}

AttributeMatrix aggregate_events(std::span<const ActivityEvent> events, std::size_t n_nodes,
                                 std::size_t n_items) {
  std::vector<Triplet> triplets;
  triplets.reserve(events.size());
  for (const auto& e : events) triplets.push_back({e.user, e.item, e.value});
  return AttributeMatrix::from_triplets(n_nodes, n_items, std::move(triplets));
}

TemporalSplit temporal_split(const EventLog& log, std::array<double, 3> fractions, SplitMode mode) {
  if (log.events.empty()) throw InvalidArgument("temporal_split: no events");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw InvalidArgument("temporal_split: fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("temporal_split: fractions must sum to 1");

  std::vector<ActivityEvent> sorted = log.events;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ActivityEvent& a, const ActivityEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  const std::size_t n = sorted.size();

  std::size_t c1 = 0, c2 = 0;
  if (mode == SplitMode::by_count) {
    auto cut = [n](double f) {
      return std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
    };
    c1 = cut(fractions[0]);
    c2 = std::max(c1, cut(fractions[0] + fractions[1]));
    // simultaneous events stay with the earlier partition
    while (c1 > 0 && c1 < n && sorted[c1].timestamp == sorted[c1 - 1].timestamp) ++c1;
    c2 = std::max(c1, c2);
    while (c2 > 0 && c2 < n && sorted[c2].timestamp == sorted[c2 - 1].timestamp) ++c2;
  } else {
    const double t0 = static_cast<double>(sorted.front().timestamp);
    const double span = static_cast<double>(sorted.back().timestamp) - t0;
    const double t1 = t0 + fractions[0] * span;
    const double t2 = t0 + (fractions[0] + fractions[1]) * span;
    auto upto = [&](double t) {
      return static_cast<std::size_t>(
          std::upper_bound(sorted.begin(), sorted.end(), t,
                           [](double v, const ActivityEvent& e) {
                             return v < static_cast<double>(e.timestamp);
                           }) -
          sorted.begin());
    };
    c1 = upto(t1);
    c2 = std::max(c1, upto(t2));
  }

  TemporalSplit split;
  split.events[0].assign(sorted.begin(), sorted.begin() + c1);
  split.events[1].assign(sorted.begin() + c1, sorted.begin() + c2);
  split.events[2].assign(sorted.begin() + c2, sorted.end());
  split.validation = aggregate_events(split.events[0], log.n_users, log.n_items);
  split.training = aggregate_events(split.events[1], log.n_users, log.n_items);
  split.testing = aggregate_events(split.events[2], log.n_users, log.n_items);
  const auto none = std::numeric_limits<std::int64_t>::min();
  split.boundaries[0] = c1 == 0 ? none : sorted[c1 - 1].timestamp;
  split.boundaries[1] = c2 == 0 ? none : sorted[c2 - 1].timestamp;
  return split;
}

void LabelCatalog::add(std::string name, std::vector<NodeId> positives) {
  std::sort(positives.begin(), positives.end());
  positives.erase(std::unique(positives.begin(), positives.end()), positives.end());
  std::vector<std::uint8_t> mask(n_nodes_, 0);
  for (NodeId i : positives) {
    if (i >= n_nodes_)
      throw InvalidArgument("labelset '" + name + "': node " + std::to_string(i) +
                            " outside 0.." + std::to_string(n_nodes_));
    mask[i] = 1;
  }
  sets_.push_back({std::move(name), std::move(positives)});
  masks_.push_back(std::move(mask));
}

std::size_t LabelCatalog::drop_empty() {
  std::size_t dropped = 0;
  for (std::size_t l = sets_.size(); l-- > 0;) {
    if (sets_[l].positives.empty()) {
      sets_.erase(sets_.begin() + static_cast<std::ptrdiff_t>(l));
      masks_.erase(masks_.begin() + static_cast<std::ptrdiff_t>(l));
      ++dropped;
    }
  }
  return dropped;
}

LabelCatalog derive_labels(const AttributeMatrix& matrix, std::span<const LabelRule> rules) {
  LabelCatalog catalog(matrix.n_nodes());
  for (const auto& rule : rules) {
    std::vector<std::uint8_t> in_rule(matrix.n_items(), 0);
    for (ItemId item : rule.items) {
      if (item >= matrix.n_items())
        throw InvalidArgument("label rule '" + rule.name + "': item " + std::to_string(item) +
                              " outside 0.." + std::to_string(matrix.n_items()));
      in_rule[item] = 1;
    }
    std::vector<NodeId> positives;
    for (NodeId i = 0; i < matrix.n_nodes(); ++i) {
      std::size_t hits = 0;
      for (const auto& e : matrix.row(i))
        if (in_rule[e.item] && e.value >= rule.min_value_per_item) ++hits;
      if (hits >= rule.min_items) positives.push_back(i);
    }
    catalog.add(rule.name, std::move(positives));
  }
  return catalog;
}

std::vector<LabelRule> parse_label_rules(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("label rules: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("label rules: expected a JSON array");
  std::vector<LabelRule> rules;
  try {
    for (const auto& r : doc) {
      LabelRule rule;
      rule.name = r.at("name").get<std::string>();
      rule.items = r.at("items").get<std::vector<ItemId>>();
      rule.min_value_per_item = r.value("min_value_per_item", 5.0);
      rule.min_items = r.value("min_items", std::size_t{5});
      rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("label rules: ") + e.what());
  }
  return rules;
}

std::vector<LabelRule> load_label_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open label rules '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_label_rules(ss.str());
}

}  // namespace netsel
