#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_set>
#include <vector>

#include "tgae/graph.hpp"
#include "tgae/mapping.hpp"
#include "tgae/perturb.hpp"
#include "tgae/rng.hpp"

namespace tgae::gen {

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(i - 1, i);
  return Graph::from_edges(n, e);
}

inline Graph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

/// Node 0 is the centre.
inline Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

inline Graph erdos_renyi(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

/// Preferential attachment with triangle closure (Holme-Kim): each new node
/// attaches m edges; after a preferential link, with probability p_triad
/// the next link goes to a neighbor of the node just linked.
inline Graph holme_kim(std::size_t n, std::size_t m, double p_triad, Rng& rng) {
  if (m == 0 || n <= m) throw InvalidArgument("holme_kim: need 0 < m < n");
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> ends;  // every edge endpoint, for degree-proportional draws
  auto link = [&](std::size_t u, std::size_t v) {
    edges.emplace_back(u, v);
    adj[u].push_back(v);
    adj[v].push_back(u);
    ends.push_back(u);
    ends.push_back(v);
  };
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = i + 1; j <= m; ++j) link(i, j);
  std::bernoulli_distribution triad(p_triad);
  for (std::size_t v = m + 1; v < n; ++v) {
    std::unordered_set<std::size_t> chosen;
    std::size_t last = n;
    while (chosen.size() < m) {
      std::size_t t = n;
      if (last != n && triad(rng)) {
        std::vector<std::size_t> cand;
        for (std::size_t w : adj[last])
          if (w != v && !chosen.contains(w)) cand.push_back(w);
        if (!cand.empty()) t = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
      }
      if (t == n) {
        t = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)];
        if (chosen.contains(t)) continue;
      }
      chosen.insert(t);
      last = t;
    }
    std::vector<std::size_t> sorted(chosen.begin(), chosen.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t t : sorted) link(v, t);
  }
  return Graph::from_edges(n, edges);
}

/// Heavy-tailed, clustered graph with exactly `num_edges` edges: Holme-Kim
/// grown slightly past the target, then uniformly thinned.
inline Graph clustered_scale_free(std::size_t n, std::size_t num_edges, std::uint64_t seed, double p_triad = 0.5) {
  Rng rng = make_rng(seed, "generator");
  if (n < 2 || num_edges > n * (n - 1) / 2) throw InvalidArgument("clustered_scale_free: edge target too high for n");
  // Small graphs lose edges to the seed clique; grow m until there is enough.
  std::size_t m = std::max<std::size_t>(1, (num_edges + n - 1) / n);
  Graph g = holme_kim(n, m, p_triad, rng);
  while (g.num_edges() < num_edges) {
    if (++m >= n) throw InvalidArgument("clustered_scale_free: edge target too high for n");
    g = holme_kim(n, m, p_triad, rng);
  }
  std::vector<Edge> e(g.edges().begin(), g.edges().end());
  for (std::size_t i = e.size(); i > 1; --i)
    std::swap(e[i - 1], e[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
  e.resize(num_edges);
  return Graph::from_edges(n, e);
}

/// Target graph for subgraph matching: the subgraph induced by a random
/// `keep_fraction` of the nodes (in random order), then perturbed uniformly.
struct SubgraphInstance {
  Graph target;
  NodeMapping anchors;  ///< source node -> target node, one per kept node
};

inline SubgraphInstance subgraph_instance(const Graph& g, double keep_fraction, double edit_level,
                                          std::uint64_t seed) {
  Rng rng = make_rng(seed, "subgraph");
  std::vector<std::size_t> nodes(g.num_nodes());
  std::iota(nodes.begin(), nodes.end(), 0);
  for (std::size_t i = nodes.size(); i > 1; --i)
    std::swap(nodes[i - 1], nodes[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
  const auto k = static_cast<std::size_t>(std::llround(keep_fraction * static_cast<double>(g.num_nodes())));
  nodes.resize(k);
  Graph sub = induced_subgraph(g, nodes);
  PerturbationSpec spec;
  spec.level = edit_level;
  spec.seed = derive_seed(seed, "perturbation");
  SubgraphInstance out{perturb(sub, spec).graph, NodeMapping(MatcherKind::GroundTruth)};
  for (std::size_t i = 0; i < k; ++i) out.anchors.add(nodes[i], i);
  return out;
}

}  // namespace tgae::gen
