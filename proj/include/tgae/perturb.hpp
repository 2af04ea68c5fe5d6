#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "tgae/graph.hpp"
#include "tgae/rng.hpp"

namespace tgae {

enum class PerturbationModel { Uniform, Degree };

inline const char* to_string(PerturbationModel m) {
  return m == PerturbationModel::Uniform ? "uniform" : "degree";
}

inline PerturbationModel perturbation_model_from_string(const std::string& s) {
  if (s == "uniform") return PerturbationModel::Uniform;
  if (s == "degree") return PerturbationModel::Degree;
  throw InvalidArgument("unknown perturbation model '" + s + "' (expected uniform|degree)");
}

struct PerturbationSpec {
  PerturbationModel model = PerturbationModel::Uniform;
  double level = 0.0;  ///< fraction of |E| to edit
  std::uint64_t seed = 0;
  /// Degree model only: refresh d_i d_j weights from the current degrees
  /// after every removal instead of freezing them from the original graph.
  bool recompute_degree_weights = false;

  /// round(level * |E|)
  std::size_t edit_count(std::size_t num_edges) const {
    if (!(level >= 0.0) || !std::isfinite(level))
      throw InvalidArgument("perturbation level must be finite and >= 0");
    return static_cast<std::size_t>(std::llround(level * static_cast<double>(num_edges)));
  }
};

struct EditRecord {
  enum class Op { Add, Remove } op;
  std::size_t u;
  std::size_t v;

  friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

struct PerturbationResult {
  Graph graph;
  std::vector<EditRecord> log;
};

/// `+ u v` / `- u v` lines.
inline void write_edit_log(std::ostream& os, const std::vector<EditRecord>& log) {
  for (const auto& e : log) os << (e.op == EditRecord::Op::Add ? '+' : '-') << ' ' << e.u << ' ' << e.v << '\n';
}

namespace detail {

inline Graph apply_edits(const Graph& g, const std::vector<EditRecord>& log) {
  std::unordered_set<std::uint64_t> removed;
  const auto key = [](std::size_t u, std::size_t v) {
    return (static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v);
  };
  std::vector<Edge> edges;
  for (const auto& e : log)
    if (e.op == EditRecord::Op::Remove) removed.insert(key(e.u, e.v));
  for (auto [u, v] : g.edges())
    if (!removed.contains(key(u, v))) edges.emplace_back(u, v);
  for (const auto& e : log)
    if (e.op == EditRecord::Op::Add) edges.emplace_back(e.u, e.v);
  return Graph::from_edges(g.num_nodes(), edges);
}

}  // namespace detail

/// Flips exactly round(p|E|) distinct node pairs chosen uniformly among all
/// unordered pairs: an edge becomes a non-edge and vice versa.
inline PerturbationResult perturb_uniform(const Graph& g, const PerturbationSpec& spec) {
  const std::size_t n = g.num_nodes();
  const std::size_t k = spec.edit_count(g.num_edges());
  const std::uint64_t pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (k > pairs)
    throw InvalidArgument("perturb_uniform: " + std::to_string(k) + " edits requested but only " +
                          std::to_string(pairs) + " node pairs are editable");
  PerturbationResult out;
  if (k == 0) {
    out.graph = g;
    return out;
  }
  Rng rng(spec.seed);
  std::vector<Edge> chosen;
  chosen.reserve(k);
  if (2 * k <= pairs) {
    // Rejection keeps the expected number of draws below 2k.
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    while (chosen.size() < k) {
      std::size_t u = node(rng), v = node(rng);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) chosen.emplace_back(u, v);
    }
  } else {
    std::vector<Edge> all;
    all.reserve(pairs);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) all.emplace_back(u, v);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
      chosen.push_back(all[i]);
    }
  }
  out.log.reserve(k);
  for (auto [u, v] : chosen)
    out.log.push_back({g.has_edge(u, v) ? EditRecord::Op::Remove : EditRecord::Op::Add, u, v});
  out.graph = detail::apply_edits(g, out.log);
  return out;
}

/// Categorical sampler over the edges of a graph with integer weights
/// d_u * d_v, supporting removal. Backed by a Fenwick tree so each draw and
/// update is O(log |E|) and exact.
class DegreeEdgeSampler {
 public:
  explicit DegreeEdgeSampler(const Graph& g, bool recompute = false)
      : graph_(&g), recompute_(recompute), deg_(g.degrees()), alive_(g.num_edges(), 1),
        weight_(g.num_edges(), 0), tree_(g.num_edges() + 1, 0) {
    if (recompute_) {
      incident_.resize(g.num_nodes());
      for (std::size_t e = 0; e < g.num_edges(); ++e) {
        incident_[g.edges()[e].first].push_back(e);
        incident_[g.edges()[e].second].push_back(e);
      }
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) set_weight(e, edge_weight(e));
  }

  std::uint64_t total_weight() const { return prefix(weight_.size()); }
  std::size_t remaining() const { return remaining_; }

  /// Current probability of every edge (0 for removed edges).
  std::vector<double> probabilities() const {
    const double t = static_cast<double>(total_weight());
    std::vector<double> p(weight_.size());
    for (std::size_t e = 0; e < p.size(); ++e) p[e] = t > 0 ? static_cast<double>(weight_[e]) / t : 0.0;
    return p;
  }

  /// Draws one remaining edge index and removes it.
  std::size_t draw(Rng& rng) {
    const std::uint64_t total = total_weight();
    std::size_t e;
    if (total == 0) {
      // Only zero-weight edges remain; fall back to uniform over them.
      std::vector<std::size_t> live;
      for (std::size_t i = 0; i < alive_.size(); ++i)
        if (alive_[i]) live.push_back(i);
      if (live.empty()) throw InvalidArgument("degree sampler exhausted");
      e = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
    } else {
      const std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng);
      e = find(r);
    }
    remove(e);
    return e;
  }

 private:
  std::uint64_t edge_weight(std::size_t e) const {
    const auto [u, v] = graph_->edges()[e];
    return static_cast<std::uint64_t>(deg_[u]) * deg_[v];
  }

  void set_weight(std::size_t e, std::uint64_t w) {
    const auto delta = static_cast<std::int64_t>(w) - static_cast<std::int64_t>(weight_[e]);
    weight_[e] = w;
    for (std::size_t i = e + 1; i < tree_.size(); i += i & (~i + 1))
      tree_[i] = static_cast<std::uint64_t>(static_cast<std::int64_t>(tree_[i]) + delta);
  }

  std::uint64_t prefix(std::size_t count) const {
    std::uint64_t s = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  // Smallest index e with prefix(e + 1) > r.
  std::size_t find(std::uint64_t r) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= r) {
        pos += step;
        r -= tree_[pos];
      }
    }
    return pos;
  }

  void remove(std::size_t e) {
    alive_[e] = 0;
    --remaining_;
    set_weight(e, 0);
    if (!recompute_) return;
    const auto [u, v] = graph_->edges()[e];
    --deg_[u];
    --deg_[v];
    for (std::size_t x : {u, v})
      for (std::size_t f : incident_[x])
        if (alive_[f]) set_weight(f, edge_weight(f));
  }

  const Graph* graph_;
  bool recompute_;
  std::vector<std::size_t> deg_;
  std::vector<char> alive_;
  std::vector<std::uint64_t> weight_;
  std::vector<std::uint64_t> tree_;
  std::vector<std::vector<std::size_t>> incident_;
  std::size_t remaining_ = graph_->num_edges();
};

/// Removes exactly round(p|E|) edges, sampled without replacement with
/// probability proportional to d_i d_j.
inline PerturbationResult perturb_degree(const Graph& g, const PerturbationSpec& spec) {
  const std::size_t k = spec.edit_count(g.num_edges());
  if (k > g.num_edges())
    throw InvalidArgument("perturb_degree: " + std::to_string(k) + " removals requested but graph has " +
                          std::to_string(g.num_edges()) + " edges");
  PerturbationResult out;
  if (k == 0) {
    out.graph = g;
    return out;
  }
  Rng rng(spec.seed);
  DegreeEdgeSampler sampler(g, spec.recompute_degree_weights);
  out.log.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto [u, v] = g.edges()[sampler.draw(rng)];
    out.log.push_back({EditRecord::Op::Remove, u, v});
  }
  out.graph = detail::apply_edits(g, out.log);
  return out;
}

inline PerturbationResult perturb(const Graph& g, const PerturbationSpec& spec) {
  return spec.model == PerturbationModel::Uniform ? perturb_uniform(g, spec) : perturb_degree(g, spec);
}

}  // namespace tgae
