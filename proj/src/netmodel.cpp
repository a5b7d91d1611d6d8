#include "netsel/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "netsel/error.hpp"

namespace netsel {

EdgeSet EdgeSet::from_adjacency(std::vector<std::vector<NodeId>> adj, bool directed) {
  const std::size_t n = adj.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = adj[i];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      throw InvalidArgument("edge set: duplicate neighbor of node " + std::to_string(i));
    for (NodeId j : list) {
      if (j >= n) throw InvalidArgument("edge set: neighbor id " + std::to_string(j) + " out of range");
      if (j == i) throw InvalidArgument("edge set: self-loop at node " + std::to_string(i));
    }
  }
  EdgeSet e;
  e.adj_ = std::move(adj);
  e.directed_ = directed;
  return e;
}

std::size_t EdgeSet::edge_count() const noexcept {
  std::size_t m = 0;
  for (const auto& l : adj_) m += l.size();
  return m;
}

bool EdgeSet::has_edge(NodeId from, NodeId to) const {
  const auto& l = adj_[from];
  return std::binary_search(l.begin(), l.end(), to);
}

std::vector<std::size_t> EdgeSet::out_degrees() const {
  std::vector<std::size_t> d(adj_.size());
  for (std::size_t i = 0; i < adj_.size(); ++i) d[i] = adj_[i].size();
  return d;
}

std::vector<std::size_t> EdgeSet::in_degrees() const {
  std::vector<std::size_t> d(adj_.size(), 0);
  for (const auto& l : adj_)
    for (NodeId j : l) ++d[j];
  return d;
}

double d_int(SparseRow a, SparseRow b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->item < ib->item) {
      ++ia;
    } else if (ib->item < ia->item) {
      ++ib;
    } else {
      sum += std::min(ia->value, ib->value);
      ++ia;
      ++ib;
    }
  }
  return sum;
}

SimilarityIndex::SimilarityIndex(const AttributeMatrix& matrix) : matrix_(&matrix) {
  offsets_.assign(matrix.n_items() + 1, 0);
  for (NodeId i = 0; i < matrix.n_nodes(); ++i)
    for (const auto& e : matrix.row(i)) ++offsets_[e.item + 1];
  for (std::size_t t = 0; t < matrix.n_items(); ++t) offsets_[t + 1] += offsets_[t];
  postings_.resize(matrix.nnz());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (NodeId i = 0; i < matrix.n_nodes(); ++i)
    for (const auto& e : matrix.row(i)) postings_[fill[e.item]++] = {i, e.value};
}

void SimilarityIndex::score(NodeId i, std::vector<double>& scores,
                            std::vector<NodeId>& touched) const {
  touched.clear();
  for (const auto& e : matrix_->row(i)) {
    for (std::size_t p = offsets_[e.item]; p < offsets_[e.item + 1]; ++p) {
      const auto [j, v] = postings_[p];
      if (j == i) continue;
      if (scores[j] == 0.0) touched.push_back(j);
      scores[j] += std::min(e.value, v);
    }
  }
}

EdgeSet build_knn(const AttributeMatrix& matrix, SimilarityParams params) {
  const std::size_t n = matrix.n_nodes();
  if (n < 2) throw InvalidArgument("build_knn: need at least 2 nodes");
  const std::size_t k = params.target_edges / n;
  if (k > n - 1)
    throw InvalidArgument("build_knn: rho/|V| = " + std::to_string(k) + " exceeds |V|-1");

  std::vector<std::vector<NodeId>> adj(n);
  if (k == 0) return EdgeSet::from_adjacency(std::move(adj), true);

  SimilarityIndex index(matrix);
  std::vector<double> scores(n, 0.0);
  std::vector<NodeId> touched;
  for (NodeId i = 0; i < n; ++i) {
    index.score(i, scores, touched);
    auto better = [&](NodeId a, NodeId b) {
      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    auto& out = adj[i];
    if (touched.size() > k) {
      std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(k),
                        touched.end(), better);
      out.assign(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      out = touched;
      // remaining slots go to zero-similarity nodes by ascending id
      std::vector<NodeId> sorted_touched = touched;
      std::sort(sorted_touched.begin(), sorted_touched.end());
      for (NodeId j = 0; j < n && out.size() < k; ++j) {
        if (j == i || std::binary_search(sorted_touched.begin(), sorted_touched.end(), j)) continue;
        out.push_back(j);
      }
    }
    for (NodeId j : touched) scores[j] = 0.0;
  }
  return EdgeSet::from_adjacency(std::move(adj), true);
}

namespace {

struct ScoredPair {
  double score;
  NodeId i;
  NodeId j;
};

// true when a ranks ahead of b
bool pair_better(const ScoredPair& a, const ScoredPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

}  // namespace

EdgeSet build_threshold(const AttributeMatrix& matrix, SimilarityParams params) {
  const std::size_t n = matrix.n_nodes();
  const std::size_t rho = params.target_edges;
  const std::size_t n_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  if (rho > n_pairs)
    throw InvalidArgument("build_threshold: rho = " + std::to_string(rho) + " exceeds the " +
                          std::to_string(n_pairs) + " available pairs");

  std::vector<std::vector<NodeId>> adj(n);
  if (rho == 0) return EdgeSet::from_adjacency(std::move(adj), true);

  // bounded heap of the best rho co-active pairs; top() is the weakest kept pair
  std::priority_queue<ScoredPair, std::vector<ScoredPair>, decltype(&pair_better)> heap(pair_better);
  SimilarityIndex index(matrix);
  std::vector<double> scores(n, 0.0);
  std::vector<NodeId> touched;
  for (NodeId i = 0; i < n; ++i) {
    index.score(i, scores, touched);
    for (NodeId j : touched) {
      if (j <= i) continue;
      ScoredPair p{scores[j], i, j};
      if (heap.size() < rho) {
        heap.push(p);
      } else if (pair_better(p, heap.top())) {
        heap.pop();
        heap.push(p);
      }
    }
    for (NodeId j : touched) scores[j] = 0.0;
  }

  std::vector<ScoredPair> kept;
  kept.reserve(rho);
  while (!heap.empty()) {
    kept.push_back(heap.top());
    heap.pop();
  }

  if (kept.size() < rho) {
    // fewer co-active pairs than rho: zero-similarity pairs fill in lexicographic order
    std::vector<std::pair<NodeId, NodeId>> nonzero;
    nonzero.reserve(kept.size());
    for (const auto& p : kept) nonzero.emplace_back(p.i, p.j);
    std::sort(nonzero.begin(), nonzero.end());
    for (NodeId i = 0; i < n && kept.size() < rho; ++i) {
      for (NodeId j = i + 1; j < n && kept.size() < rho; ++j) {
        if (!std::binary_search(nonzero.begin(), nonzero.end(), std::make_pair(i, j)))
          kept.push_back({0.0, i, j});
      }
    }
  }

  for (const auto& p : kept) {
    adj[p.i].push_back(p.j);
    adj[p.j].push_back(p.i);
  }
  return EdgeSet::from_adjacency(std::move(adj), true);
}

EdgeFile parse_edges(std::istream& in, std::size_t n_nodes) {
  std::vector<std::vector<NodeId>> adj(n_nodes);
  EdgeFile result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (a.front() == '#') continue;
    if (!(fields >> b) || (fields >> extra))
      throw ParseError("expected \"src dst\"", line_no);
    auto parse = [&](const std::string& s) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad node id '" + s + "'", line_no);
      if (v >= n_nodes)
        throw ParseError("node id " + s + " >= n_nodes (" + std::to_string(n_nodes) + ")", line_no);
      return static_cast<NodeId>(v);
    };
    const NodeId src = parse(a);
    const NodeId dst = parse(b);
    if (src == dst) {
      ++result.self_loops_dropped;
      continue;
    }
    adj[src].push_back(dst);
  }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    auto last = std::unique(l.begin(), l.end());
    result.duplicates_dropped += static_cast<std::size_t>(l.end() - last);
    l.erase(last, l.end());
  }
  result.edges = EdgeSet::from_adjacency(std::move(adj), true);
  return result;
}

EdgeFile load_edges(const std::filesystem::path& path, std::size_t n_nodes) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open edge file '" + path.string() + "'");
  try {
    return parse_edges(in, n_nodes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_edges(std::ostream& out, const EdgeSet& edges) {
  std::ostringstream buf;
  for (NodeId i = 0; i < edges.n_nodes(); ++i)
    for (NodeId j : edges.out(i)) buf << i << ' ' << j << '\n';
  out << buf.str();
}

}  // namespace netsel
