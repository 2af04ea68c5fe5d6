#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tgae/error.hpp"
#include "tgae/mapping.hpp"
#include "tgae/matrix.hpp"

namespace tgae {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph stored as CSR with sorted neighbor lists.
///
/// Immutable after construction. The edge list holds each edge once with
/// u < v, sorted lexicographically.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on `n` nodes. Self-loops and duplicate edges (in either
  /// orientation) are dropped.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u >= n || v >= n)
        throw InvalidArgument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") out of range for " + std::to_string(n) + " nodes");
      if (u == v) continue;
      canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::ranges::sort(canon);
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    Graph g;
    g.n_ = n;
    g.edges_ = std::move(canon);
    g.degrees_.assign(n, 0);
    for (auto [u, v] : g.edges_) {
      ++g.degrees_[u];
      ++g.degrees_[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + g.degrees_[i];
    g.neighbors_.resize(2 * g.edges_.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : g.edges_) {
      g.neighbors_[cursor[u]++] = v;
      g.neighbors_[cursor[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i)
      std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    return g;
  }

  static Graph from_edges(std::size_t n, std::initializer_list<Edge> edges) {
    return from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }
  std::size_t degree(std::size_t v) const { return degrees_[v]; }

  std::span<const std::size_t> neighbors(std::size_t v) const {
    return {neighbors_.data() + offsets_[v], degrees_[v]};
  }

  bool has_edge(std::size_t u, std::size_t v) const {
    if (u >= n_ || v >= n_ || u == v) return false;
    auto nb = neighbors(degrees_[u] <= degrees_[v] ? u : v);
    const std::size_t other = degrees_[u] <= degrees_[v] ? v : u;
    return std::binary_search(nb.begin(), nb.end(), other);
  }

  /// Dense 0/1 adjacency.
  Matrix adjacency() const {
    Matrix a(n_, n_);
    for (auto [u, v] : edges_) a(u, v) = a(v, u) = 1.0;
    return a;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degrees_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
};

/// Bijection on {0..N-1}; node i is relabelled to map[i].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<char> seen(map_.size(), 0);
    for (std::size_t v : map_) {
      if (v >= map_.size() || seen[v]) throw InvalidArgument("not a permutation");
      seen[v] = 1;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  template <class URBG>
  static Permutation random(std::size_t n, URBG& rng) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), 0);
    // Explicit Fisher-Yates so the draw sequence does not depend on the
    // standard library's shuffle.
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(m[i - 1], m[pick(rng)]);
    }
    return Permutation(std::move(m));
  }

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator[](std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
    return Permutation(std::move(inv));
  }

  NodeMapping as_mapping() const { return NodeMapping::from_targets(map_); }

 private:
  std::vector<std::size_t> map_;
};

/// Sparse symmetric real operator in CSR form.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t n, std::vector<std::size_t> offsets, std::vector<std::size_t> cols,
                 std::vector<double> vals)
      : n_(n), offsets_(std::move(offsets)), cols_(std::move(cols)), vals_(std::move(vals)) {}

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return vals_.size(); }

  /// Y = S X
  Matrix apply(const Matrix& x) const {
    require_shape(x.rows() == n_, "operator is " + std::to_string(n_) + "x" +
                                      std::to_string(n_) + " but input has " +
                                      std::to_string(x.rows()) + " rows");
    Matrix y(n_, x.cols());
    const std::size_t c = x.cols();
    for (std::size_t i = 0; i < n_; ++i) {
      double* yi = y.data() + i * c;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        const double w = vals_[k];
        const double* xj = x.data() + cols_[k] * c;
        for (std::size_t j = 0; j < c; ++j) yi[j] += w * xj[j];
      }
    }
    return y;
  }

  /// Y = S^T X
  Matrix apply_transpose(const Matrix& x) const {
    require_shape(x.rows() == n_, "operator transpose: row mismatch");
    Matrix y(n_, x.cols());
    const std::size_t c = x.cols();
    for (std::size_t i = 0; i < n_; ++i) {
      const double* xi = x.data() + i * c;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        const double w = vals_[k];
        double* yj = y.data() + cols_[k] * c;
        for (std::size_t j = 0; j < c; ++j) yj[j] += w * xi[j];
      }
    }
    return y;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) y[i] += vals_[k] * x[cols_[k]];
    return y;
  }

  Matrix to_dense() const {
    Matrix d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, cols_[k]) = vals_[k];
    return d;
  }

  /// Zero operator (the empty graph).
  static SparseOperator zero(std::size_t n) {
    return SparseOperator(n, std::vector<std::size_t>(n + 1, 0), {}, {});
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

/// D^{-1/2} A D^{-1/2}; isolated nodes give empty rows and columns.
inline SparseOperator normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    if (g.degree(v) > 0) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
  std::vector<std::size_t> offsets(n + 1, 0), cols;
  std::vector<double> vals;
  cols.reserve(2 * g.num_edges());
  vals.reserve(2 * g.num_edges());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u : g.neighbors(v)) {
      cols.push_back(u);
      vals.push_back(inv_sqrt[v] * inv_sqrt[u]);
    }
    offsets[v + 1] = cols.size();
  }
  return SparseOperator(n, std::move(offsets), std::move(cols), std::move(vals));
}

/// Relabels node u as perm[u].
inline Graph permute(const Graph& g, const Permutation& perm) {
  if (perm.size() != g.num_nodes())
    throw ShapeError("permute: permutation has length " + std::to_string(perm.size()) +
                     " but graph has " + std::to_string(g.num_nodes()) + " nodes");
  std::vector<Edge> e;
  e.reserve(g.num_edges());
  for (auto [u, v] : g.edges()) e.emplace_back(perm[u], perm[v]);
  return Graph::from_edges(g.num_nodes(), e);
}

/// Number of ordered node pairs (u, v) where adjacency of `s` at (u, v)
/// differs from adjacency of `s_hat` at (m(u), m(v)), i.e. the squared
/// Frobenius norm of S - P S_hat P^T for the 0/1 adjacencies.
inline std::size_t edge_disagreement(const Graph& s, const Graph& s_hat, const NodeMapping& mapping) {
  if (s.num_nodes() != s_hat.num_nodes())
    throw ShapeError("edge_disagreement: graphs differ in size");
  const auto m = mapping.as_total(s.num_nodes());
  for (std::size_t t : m)
    if (t >= s_hat.num_nodes()) throw InvalidArgument("edge_disagreement: target out of range");
  // Count edges of s not preserved, and edges of s_hat not hit by the image.
  std::size_t preserved = 0;
  for (auto [u, v] : s.edges())
    if (s_hat.has_edge(m[u], m[v])) ++preserved;
  const std::size_t missing = s.num_edges() - preserved;
  const std::size_t extra = s_hat.num_edges() - preserved;
  return 2 * (missing + extra);
}

/// Induced subgraph on `keep` (new node i is old node keep[i]).
inline Graph induced_subgraph(const Graph& g, std::span<const std::size_t> keep) {
  std::vector<std::size_t> pos(g.num_nodes(), g.num_nodes());
  for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = i;
  std::vector<Edge> e;
  for (auto [u, v] : g.edges())
    if (pos[u] < g.num_nodes() && pos[v] < g.num_nodes()) e.emplace_back(pos[u], pos[v]);
  return Graph::from_edges(keep.size(), e);
}

// ---------------------------------------------------------------------------
// Text formats

/// A graph read from an edge list together with the original id of every
/// dense node index (first-appearance order).
struct LoadedGraph {
  Graph graph;
  std::vector<std::int64_t> original_ids;

  std::unordered_map<std::int64_t, std::size_t> index_of_ids() const {
    std::unordered_map<std::int64_t, std::size_t> m;
    for (std::size_t i = 0; i < original_ids.size(); ++i) m.emplace(original_ids[i], i);
    return m;
  }
};

namespace detail {

inline bool is_blank_or_comment(std::string_view line) {
  auto p = line.find_first_not_of(" \t\r");
  return p == std::string_view::npos || line[p] == '#';
}

/// Splits a line into exactly two integer tokens.
inline std::pair<std::int64_t, std::int64_t> parse_id_pair(std::string_view line, std::size_t lineno) {
  std::int64_t out[2];
  std::size_t pos = 0;
  for (int t = 0; t < 2; ++t) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) throw ParseError("expected two integer node ids", lineno);
    auto end = line.find_first_of(" \t\r", pos);
    if (end == std::string_view::npos) end = line.size();
    auto tok = line.substr(pos, end - pos);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out[t]);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("invalid node id '" + std::string(tok) + "'", lineno);
    pos = end;
  }
  if (line.find_first_not_of(" \t\r", pos) != std::string_view::npos)
    throw ParseError("trailing tokens after node ids", lineno);
  return {out[0], out[1]};
}

template <class F>
void for_each_id_pair(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    auto line = text.substr(start, end - start);
    if (!is_blank_or_comment(line)) f(parse_id_pair(line, lineno));
    start = end + 1;
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses a whitespace-separated edge list. Ids are densified in order of
/// first appearance; duplicates and self-loops are dropped.
inline LoadedGraph parse_edge_list(std::string_view text) {
  LoadedGraph out;
  std::unordered_map<std::int64_t, std::size_t> index;
  std::vector<Edge> edges;
  auto id = [&](std::int64_t raw) {
    auto [it, inserted] = index.emplace(raw, out.original_ids.size());
    if (inserted) out.original_ids.push_back(raw);
    return it->second;
  };
  detail::for_each_id_pair(text, [&](std::pair<std::int64_t, std::int64_t> p) {
    const std::size_t u = id(p.first);
    const std::size_t v = id(p.second);
    edges.emplace_back(u, v);
  });
  if (out.original_ids.empty()) throw ParseError("edge list is empty", 0);
  out.graph = Graph::from_edges(out.original_ids.size(), edges);
  return out;
}

inline LoadedGraph read_edge_list(const std::string& path) {
  return parse_edge_list(detail::read_file(path));
}

/// Writes one `u v` line per edge using dense ids, or original ids when given.
inline void write_edge_list(std::ostream& os, const Graph& g,
                            std::span<const std::int64_t> ids = {}) {
  for (auto [u, v] : g.edges()) {
    if (ids.empty())
      os << u << ' ' << v << '\n';
    else
      os << ids[u] << ' ' << ids[v] << '\n';
  }
}

/// Sidecar `dense_index original_id` table.
inline void write_id_map(std::ostream& os, std::span<const std::int64_t> ids) {
  os << "# dense_index original_id\n";
  for (std::size_t i = 0; i < ids.size(); ++i) os << i << ' ' << ids[i] << '\n';
}

/// Parses `src_id tgt_id` lines of a ground-truth alignment and resolves them
/// against the id tables of the two graphs.
inline NodeMapping parse_alignment(std::string_view text, const LoadedGraph& src,
                                   const LoadedGraph& tgt) {
  const auto si = src.index_of_ids();
  const auto ti = tgt.index_of_ids();
  NodeMapping m(MatcherKind::GroundTruth);
  detail::for_each_id_pair(text, [&](std::pair<std::int64_t, std::int64_t> p) {
    auto a = si.find(p.first);
    auto b = ti.find(p.second);
    if (a == si.end() || b == ti.end())
      throw InvalidArgument("alignment pair " + std::to_string(p.first) + " " +
                            std::to_string(p.second) + " references a node absent from the graphs");
    m.add(a->second, b->second);
  });
  return m;
}

}  // namespace tgae
