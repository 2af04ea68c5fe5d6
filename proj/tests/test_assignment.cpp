#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tgae/assignment.hpp"
#include "tgae/graph.hpp"
#include "tgae/rng.hpp"

using namespace tgae;

namespace {

Matrix random_distances(std::size_t r, std::size_t c, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  Matrix d(r, c);
  for (auto& v : d.values()) v = u(rng);
  return d;
}

// Minimum over all injections of the smaller side into the larger.
double brute_force_min(const Matrix& d) {
  const bool tall = d.rows() > d.cols();
  const Matrix a = tall ? d.transposed() : d;
  std::vector<std::size_t> cols(a.cols());
  std::iota(cols.begin(), cols.end(), 0);
  double best = INFINITY;
  do {
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, cols[i]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

void expect_injective(const NodeMapping& m, std::size_t n1, std::size_t n2) {
  std::vector<char> rows(n1), cols(n2);
  for (const auto& p : m.pairs()) {
    ASSERT_LT(p.source, n1);
    ASSERT_LT(p.target, n2);
    EXPECT_FALSE(rows[p.source]);
    EXPECT_FALSE(cols[p.target]);
    rows[p.source] = cols[p.target] = 1;
  }
  EXPECT_EQ(m.size(), std::min(n1, n2));
}

}  // namespace

TEST(Greedy, TwoByTwoCounterExample) {
  const Matrix d{{1, 2}, {1.5, 10}};
  const auto g = greedy_match(d);
  EXPECT_TRUE(g.contains(0, 0));
  EXPECT_TRUE(g.contains(1, 1));
  EXPECT_DOUBLE_EQ(assignment_cost(d, g), 11.0);
  const auto e = hungarian_exact(d);
  EXPECT_TRUE(e.contains(0, 1));
  EXPECT_TRUE(e.contains(1, 0));
  EXPECT_DOUBLE_EQ(assignment_cost(d, e), 3.5);
  EXPECT_EQ(g.tag(), MatcherKind::Greedy);
  EXPECT_EQ(e.tag(), MatcherKind::Exact);
}

TEST(Greedy, TiesGoToLowestRowThenColumn) {
  const auto m = greedy_match(Matrix{{1, 1}, {1, 1}});
  EXPECT_TRUE(m.contains(0, 0));
  EXPECT_TRUE(m.contains(1, 1));
  EXPECT_EQ(m.pairs()[0].source, 0u);
}

TEST(Greedy, SingleColumn) {
  const auto m = greedy_match(Matrix{{1}, {2}});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_TRUE(m.contains(0, 0));
}

TEST(Greedy, MatchesNaiveGlobalMinimumLoop) {
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix d = random_distances(9, 7, rng);
    std::vector<char> r(9), c(7);
    NodeMapping naive;
    for (int k = 0; k < 7; ++k) {
      double best = INFINITY;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 7; ++j)
          if (!r[i] && !c[j] && d(i, j) < best) best = d(i, j), bi = i, bj = j;
      r[bi] = c[bj] = 1;
      naive.add(bi, bj);
    }
    const auto g = greedy_match(d);
    for (const auto& p : naive.pairs()) EXPECT_TRUE(g.contains(p.source, p.target));
  }
}

TEST(Greedy, InvariantToConstantShift) {
  Rng rng(4);
  const Matrix d = random_distances(20, 20, rng);
  Matrix shifted = d;
  for (auto& v : shifted.values()) v += 3.25;
  const auto a = greedy_match(d), b = greedy_match(shifted);
  for (const auto& p : a.pairs()) EXPECT_TRUE(b.contains(p.source, p.target));
}

TEST(Exact, MatchesBruteForceUpToSix) {
  Rng rng(5);
  for (std::size_t n1 = 1; n1 <= 6; ++n1)
    for (std::size_t n2 = 1; n2 <= 6; ++n2)
      for (int rep = 0; rep < 5; ++rep) {
        const Matrix d = random_distances(n1, n2, rng);
        const auto m = hungarian_exact(d);
        expect_injective(m, n1, n2);
        EXPECT_NEAR(assignment_cost(d, m), brute_force_min(d), 1e-9) << n1 << "x" << n2;
      }
}

TEST(Exact, NeverWorseThanGreedy) {
  Rng rng(6);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int rep = 0; rep < 1000; ++rep) {
    const Matrix d = random_distances(size(rng), size(rng), rng);
    const double e = assignment_cost(d, hungarian_exact(d));
    const double g = assignment_cost(d, greedy_match(d));
    ASSERT_LE(e, g + 1e-9);
  }
}

TEST(Exact, RectangularIsInjectiveAndComplete) {
  Rng rng(7);
  const Matrix tall = random_distances(30, 12, rng);
  expect_injective(hungarian_exact(tall), 30, 12);
  expect_injective(greedy_match(tall), 30, 12);
  const Matrix wide = random_distances(12, 30, rng);
  expect_injective(hungarian_exact(wide), 12, 30);
}

TEST(Matchers, RejectNonFinite) {
  Matrix d{{1, NAN}, {2, 3}};
  EXPECT_THROW(greedy_match(d), NumericError);
  EXPECT_THROW(hungarian_exact(d), NumericError);
}

TEST(Distances, MatchNaiveOracleAndAreSymmetric) {
  Rng rng(8);
  std::normal_distribution<double> nd;
  Matrix a(13, 5), b(9, 5);
  for (auto& v : a.values()) v = nd(rng);
  for (auto& v : b.values()) v = nd(rng);
  const auto d = pairwise_distances(a, b);
  for (std::size_t i = 0; i < 13; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 5; ++k) s += std::pow(a(i, k) - b(j, k), 2);
      EXPECT_NEAR(d(i, j), std::sqrt(s), 1e-12);
    }
  EXPECT_EQ(pairwise_distances(b, a), d.transposed());
  EXPECT_THROW(pairwise_distances(a, Matrix(3, 4)), ShapeError);
}

TEST(ApproxNN, RecoversPermutationOfDistinctEmbeddings) {
  Rng rng(9);
  std::normal_distribution<double> nd;
  Matrix e(200, 6);
  for (auto& v : e.values()) v = nd(rng);
  const Permutation pi = Permutation::random(200, rng);
  const Matrix eh = permute_rows(e, pi.map());
  for (auto kind : {ProjectionKind::PrincipalAxis, ProjectionKind::Norm}) {
    const auto m = approx_nn_match(e, eh, kind);
    ASSERT_EQ(m.size(), 200u);
    for (std::size_t i = 0; i < 200; ++i) EXPECT_TRUE(m.contains(i, pi[i])) << to_string(kind);
  }
}

TEST(ApproxNN, TiesResolveByIndex) {
  const Matrix e{{1, 0}, {1, 0}, {2, 0}};
  const auto m = approx_nn_match(e, e, ProjectionKind::Norm);
  EXPECT_TRUE(m.contains(0, 0));
  EXPECT_TRUE(m.contains(1, 1));
  EXPECT_TRUE(m.contains(2, 2));
}

TEST(ApproxNN, RequiresEqualSizes) {
  EXPECT_THROW(approx_nn_match(Matrix(3, 2), Matrix(4, 2)), ShapeError);
}

TEST(Mapping, WriterTranslatesIds) {
  NodeMapping m(MatcherKind::Greedy);
  m.add(0, 1, 0.5);
  const std::vector<std::int64_t> src = {10, 11}, tgt = {20, 21};
  std::ostringstream os;
  write_mapping(os, m, src, tgt);
  EXPECT_EQ(os.str(), "# matcher greedy\n10 21 0.5\n");
  EXPECT_THROW(match_embeddings(MatcherKind::GroundTruth, Matrix(1, 1), Matrix(1, 1)), InvalidArgument);
}
