#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tgae/generators.hpp"
#include "tgae/graph.hpp"

using namespace tgae;

namespace {

// Brute force ||A - P B P^T||_F^2 on dense adjacency.
std::size_t dense_disagreement(const Graph& a, const Graph& b, const std::vector<std::size_t>& m) {
  const Matrix da = a.adjacency(), db = b.adjacency();
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.num_nodes(); ++i)
    for (std::size_t j = 0; j < a.num_nodes(); ++j)
      if (da(i, j) != db(m[i], m[j])) ++d;
  return d;
}

}  // namespace

TEST(EdgeList, PathGraph) {
  const auto g = parse_edge_list("0 1\n1 2").graph;
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degrees(), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(EdgeList, DropsDuplicatesAndSelfLoops) {
  const auto lg = parse_edge_list("5 9\n9 5\n5 5");
  EXPECT_EQ(lg.graph.num_nodes(), 2u);
  EXPECT_EQ(lg.graph.num_edges(), 1u);
  EXPECT_EQ(lg.original_ids, (std::vector<std::int64_t>{5, 9}));
}

TEST(EdgeList, FirstAppearanceOrderAndComments) {
  const auto lg = parse_edge_list("# header\n\n  42\t7  \n7 -3\r\n# trailing\n");
  EXPECT_EQ(lg.original_ids, (std::vector<std::int64_t>{42, 7, -3}));
  EXPECT_TRUE(lg.graph.has_edge(0, 1));
  EXPECT_TRUE(lg.graph.has_edge(1, 2));
  EXPECT_FALSE(lg.graph.has_edge(0, 2));
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse_edge_list("0 1\n1 2\n3 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_edge_list("0 1 2\n"), ParseError);
  EXPECT_THROW(parse_edge_list("0\n"), ParseError);
  EXPECT_THROW(parse_edge_list("1.5 2\n"), ParseError);
}

TEST(EdgeList, EmptyInputIsAnError) {
  EXPECT_THROW(parse_edge_list(""), ParseError);
  EXPECT_THROW(parse_edge_list("# only comments\n\n"), ParseError);
}

TEST(EdgeList, WriteRoundTripWithOriginalIds) {
  const auto lg = parse_edge_list("10 20\n20 30\n30 10\n");
  std::ostringstream os;
  write_edge_list(os, lg.graph, lg.original_ids);
  const auto back = parse_edge_list(os.str());
  EXPECT_EQ(back.graph.num_edges(), 3u);
  std::ostringstream ids;
  write_id_map(ids, lg.original_ids);
  EXPECT_NE(ids.str().find("2 30"), std::string::npos);
}

TEST(Graph, InvariantsOnRandomGraph) {
  Rng rng(3);
  const Graph g = gen::erdos_renyi(40, 0.2, rng);
  const Matrix a = g.adjacency();
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(a(i, i), 0.0);
    double deg = 0;
    for (std::size_t j = 0; j < 40; ++j) {
      EXPECT_EQ(a(i, j), a(j, i));
      EXPECT_EQ(a(i, j) == 1.0, g.has_edge(i, j));
      deg += a(i, j);
      nnz += a(i, j) != 0;
    }
    EXPECT_EQ(deg, static_cast<double>(g.degree(i)));
  }
  EXPECT_EQ(nnz, 2 * g.num_edges());
}

TEST(Graph, OutOfRangeEdgeRejected) {
  EXPECT_THROW(Graph::from_edges(2, {{0, 2}}), InvalidArgument);
}

TEST(Normalize, SingleEdge) {
  const Matrix s = normalize_adjacency(gen::path(2)).to_dense();
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 1.0);
}

TEST(Normalize, Triangle) {
  const Matrix s = normalize_adjacency(gen::complete(3)).to_dense();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(s(i, j), i == j ? 0.0 : 0.5);
}

TEST(Normalize, FourLeafStar) {
  const Matrix s = normalize_adjacency(gen::star(4)).to_dense();
  for (std::size_t leaf = 1; leaf <= 4; ++leaf) {
    EXPECT_DOUBLE_EQ(s(0, leaf), 1.0 / std::sqrt(4.0 * 1.0));
    EXPECT_DOUBLE_EQ(s(0, leaf), 0.5);
  }
}

TEST(Normalize, IsolatedNodesGiveZeroRows) {
  const Graph g = Graph::from_edges(4, {{0, 1}});
  const Matrix s = normalize_adjacency(g).to_dense();
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(s(2, j), 0.0);
    EXPECT_EQ(s(j, 3), 0.0);
  }
}

TEST(Normalize, SpectralRadiusAtMostOne) {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const Graph g = gen::erdos_renyi(60, 0.08, rng);
    const SparseOperator s = normalize_adjacency(g);
    std::vector<double> x(60);
    std::normal_distribution<double> nd;
    for (auto& v : x) v = nd(rng);
    double ratio = 0;
    for (int it = 0; it < 300; ++it) {
      auto y = s.apply(std::span<const double>(x));
      double nx = 0, ny = 0;
      for (std::size_t i = 0; i < 60; ++i) {
        nx += x[i] * x[i];
        ny += y[i] * y[i];
      }
      ratio = std::sqrt(ny / nx);
      if (ny == 0) break;
      for (std::size_t i = 0; i < 60; ++i) x[i] = y[i] / std::sqrt(ny);
    }
    EXPECT_LE(ratio, 1.0 + 1e-12);
  }
}

TEST(Permute, IdentityIsStructurallyIdentical) {
  Rng rng(5);
  const Graph g = gen::erdos_renyi(30, 0.2, rng);
  EXPECT_EQ(permute(g, Permutation::identity(30)), g);
}

TEST(Permute, ReversedPath) {
  const Graph p = gen::path(3);
  const Graph q = permute(p, Permutation({2, 1, 0}));
  EXPECT_TRUE(q.has_edge(2, 1));
  EXPECT_TRUE(q.has_edge(1, 0));
  EXPECT_EQ(q.degree(1), 2u);
}

TEST(Permute, LengthMismatch) {
  EXPECT_THROW(permute(gen::path(3), Permutation::identity(4)), ShapeError);
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(Permutation({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(Permutation({0, 3, 1}), InvalidArgument);
  const Permutation p({2, 0, 1});
  const Permutation q = p.inverse();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(q[p[i]], i);
}

TEST(EdgeDisagreement, IdenticalGraphsIdentityMapping) {
  const Graph g = gen::cycle(6);
  EXPECT_EQ(edge_disagreement(g, g, Permutation::identity(6).as_mapping()), 0u);
}

TEST(EdgeDisagreement, PathWithSwappedEndpointAndCenter) {
  const Graph p = gen::path(3);
  const std::vector<std::size_t> swap01 = {1, 0, 2};
  EXPECT_EQ(dense_disagreement(p, p, swap01), 4u);
  EXPECT_EQ(edge_disagreement(p, p, NodeMapping::from_targets(swap01)), 4u);
}

TEST(EdgeDisagreement, PermutedGraphUnderItsPermutationIsZero) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph g = gen::erdos_renyi(50, 0.1, rng);
    const Permutation pi = Permutation::random(50, rng);
    EXPECT_EQ(edge_disagreement(g, permute(g, pi), pi.as_mapping()), 0u);
  }
}

TEST(EdgeDisagreement, MatchesDenseOracle) {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph a = gen::erdos_renyi(15, 0.3, rng);
    const Graph b = gen::erdos_renyi(15, 0.3, rng);
    const Permutation pi = Permutation::random(15, rng);
    EXPECT_EQ(edge_disagreement(a, b, pi.as_mapping()), dense_disagreement(a, b, pi.map()));
  }
}

TEST(EdgeDisagreement, PartialMappingRejected) {
  NodeMapping m;
  m.add(0, 0);
  EXPECT_THROW(edge_disagreement(gen::path(3), gen::path(3), m), InvalidArgument);
}

TEST(NodeMapping, InjectiveOnBothSides) {
  NodeMapping m;
  m.add(0, 1);
  EXPECT_THROW(m.add(0, 2), InvalidArgument);
  EXPECT_THROW(m.add(3, 1), InvalidArgument);
  EXPECT_EQ(m.size(), 1u);
  EXPECT_TRUE(m.contains(0, 1));
}

TEST(Alignment, ResolvesOriginalIds) {
  const auto src = parse_edge_list("10 11\n11 12\n");
  const auto tgt = parse_edge_list("7 8\n8 9\n");
  const auto m = parse_alignment("10 9\n# c\n12 7\n", src, tgt);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.contains(0, 2));
  EXPECT_TRUE(m.contains(2, 0));
  EXPECT_THROW(parse_alignment("99 7\n", src, tgt), InvalidArgument);
}

TEST(InducedSubgraph, KeepsOrder) {
  const Graph c = gen::cycle(5);
  const std::vector<std::size_t> keep = {3, 2, 1};
  const Graph s = induced_subgraph(c, keep);
  EXPECT_EQ(s.num_edges(), 2u);
  EXPECT_TRUE(s.has_edge(0, 1));
  EXPECT_TRUE(s.has_edge(1, 2));
}
