#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "tgae/eigen.hpp"
#include "tgae/features.hpp"
#include "tgae/mapping.hpp"
#include "tgae/matrix.hpp"
#include "tgae/parallel.hpp"

namespace tgae {

/// N1 x N2 nonnegative distances, row = source node, column = target node.
using DistanceMatrix = Matrix;

/// Euclidean distance between every source and target row. Computed from
/// coordinate differences, so swapping the arguments gives the exact
/// transpose.
inline DistanceMatrix pairwise_distances(const FeatureMatrix& e, const FeatureMatrix& e_hat) {
  require_shape(e.cols() == e_hat.cols(), "pairwise_distances: feature dimensions differ (" +
                                              std::to_string(e.cols()) + " vs " + std::to_string(e_hat.cols()) +
                                              ")");
  const std::size_t n1 = e.rows(), n2 = e_hat.rows(), f = e.cols();
  DistanceMatrix d(n1, n2);
  parallel_for(n1, [&](std::size_t i) {
    const double* a = e.data() + i * f;
    for (std::size_t j = 0; j < n2; ++j) {
      const double* b = e_hat.data() + j * f;
      double s = 0.0;
      for (std::size_t k = 0; k < f; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
      }
      d(i, j) = std::sqrt(s);
    }
  });
  return d;
}

namespace detail {

inline void require_finite(const DistanceMatrix& d, const char* who) {
  if (!d.all_finite()) throw NumericError(std::string(who) + ": distance matrix has non-finite entries");
}

}  // namespace detail

/// Greedy assignment: repeatedly commit the globally smallest entry among
/// unassigned rows and columns, ties to the lowest (row, col). Each row keeps
/// its columns sorted by distance; a heap holds one candidate per row and
/// stale candidates (column already taken) are advanced lazily.
inline NodeMapping greedy_match(const DistanceMatrix& d) {
  detail::require_finite(d, "greedy_match");
  const std::size_t n1 = d.rows(), n2 = d.cols();
  NodeMapping out(MatcherKind::Greedy);
  if (n1 == 0 || n2 == 0) return out;

  std::vector<std::uint32_t> order(n1 * n2);
  parallel_for(n1, [&](std::size_t i) {
    auto* o = order.data() + i * n2;
    std::iota(o, o + n2, 0u);
    const double* row = d.data() + i * n2;
    std::sort(o, o + n2, [row](std::uint32_t a, std::uint32_t b) {
      return row[a] < row[b] || (row[a] == row[b] && a < b);
    });
  });

  struct Cand {
    double value;
    std::size_t row, col;
    bool operator>(const Cand& o) const {
      if (value != o.value) return value > o.value;
      if (row != o.row) return row > o.row;
      return col > o.col;
    }
  };
  std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
  std::vector<std::size_t> cursor(n1, 0);
  std::vector<char> col_taken(n2, 0);
  for (std::size_t i = 0; i < n1; ++i) heap.push({d(i, order[i * n2]), i, order[i * n2]});

  const std::size_t want = std::min(n1, n2);
  while (out.size() < want) {
    const Cand c = heap.top();
    heap.pop();
    if (col_taken[c.col]) {
      std::size_t& k = cursor[c.row];
      while (col_taken[order[c.row * n2 + k]]) ++k;
      const std::size_t j = order[c.row * n2 + k];
      heap.push({d(c.row, j), c.row, j});
      continue;
    }
    out.add(c.row, c.col, c.value);
    col_taken[c.col] = 1;
  }
  return out;
}

namespace detail {

/// Shortest augmenting path with potentials on an n <= m cost matrix;
/// returns the column assigned to each row.
inline std::vector<std::size_t> hungarian_rows_le_cols(const Matrix& a) {
  const std::size_t n = a.rows(), m = a.cols();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const double* row = a.data() + (i0 - 1) * m;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) assign[p[j] - 1] = j - 1;
  return assign;
}

}  // namespace detail

/// Minimum-total-distance assignment, O(n^2 m). A rectangular matrix is
/// solved on its wide orientation, which is the same as padding the short
/// side with a sentinel cost and dropping the dummy pairs.
inline NodeMapping hungarian_exact(const DistanceMatrix& d) {
  detail::require_finite(d, "hungarian_exact");
  NodeMapping out(MatcherKind::Exact);
  if (d.rows() == 0 || d.cols() == 0) return out;
  if (d.rows() <= d.cols()) {
    const auto assign = detail::hungarian_rows_le_cols(d);
    for (std::size_t i = 0; i < assign.size(); ++i) out.add(i, assign[i], d(i, assign[i]));
  } else {
    const auto assign = detail::hungarian_rows_le_cols(d.transposed());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j < assign.size(); ++j) pairs.emplace_back(assign[j], j);
    std::sort(pairs.begin(), pairs.end());
    for (auto [i, j] : pairs) out.add(i, j, d(i, j));
  }
  return out;
}

/// How approx_nn_match reduces an embedding to one number per node.
enum class ProjectionKind {
  PrincipalAxis,  ///< top principal component of both embedding sets stacked
  Norm,           ///< Euclidean norm of each row
};

inline const char* to_string(ProjectionKind k) { return k == ProjectionKind::PrincipalAxis ? "pca" : "norm"; }

inline ProjectionKind projection_from_string(const std::string& s) {
  if (s == "pca") return ProjectionKind::PrincipalAxis;
  if (s == "norm") return ProjectionKind::Norm;
  throw InvalidArgument("unknown projection '" + s + "' (expected pca|norm)");
}

namespace detail {

/// Unit vector along the largest-variance direction of the rows of a and b
/// taken together.
inline std::vector<double> principal_axis(const FeatureMatrix& a, const FeatureMatrix& b) {
  const std::size_t f = a.cols();
  const double n = static_cast<double>(a.rows() + b.rows());
  std::vector<double> mean(f, 0.0);
  for (const Matrix* m : {&a, &b})
    for (std::size_t i = 0; i < m->rows(); ++i)
      for (std::size_t k = 0; k < f; ++k) mean[k] += (*m)(i, k);
  for (auto& x : mean) x /= n;
  Matrix cov(f, f);
  std::vector<double> c(f);
  for (const Matrix* m : {&a, &b})
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t k = 0; k < f; ++k) c[k] = (*m)(i, k) - mean[k];
      for (std::size_t k = 0; k < f; ++k)
        for (std::size_t l = k; l < f; ++l) cov(k, l) += c[k] * c[l];
    }
  for (std::size_t k = 0; k < f; ++k)
    for (std::size_t l = 0; l < k; ++l) cov(k, l) = cov(l, k);
  const auto eig = symmetric_eigen(cov);
  std::vector<double> axis(f);
  for (std::size_t k = 0; k < f; ++k) axis[k] = eig.vectors(k, f - 1);
  return axis;
}

inline std::vector<double> project(const FeatureMatrix& e, ProjectionKind kind, const std::vector<double>& axis) {
  std::vector<double> p(e.rows());
  for (std::size_t i = 0; i < e.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < e.cols(); ++k) s += kind == ProjectionKind::Norm ? e(i, k) * e(i, k) : e(i, k) * axis[k];
    p[i] = kind == ProjectionKind::Norm ? std::sqrt(s) : s;
  }
  return p;
}

inline std::vector<std::size_t> rank_order(const std::vector<double>& p) {
  std::vector<std::size_t> o(p.size());
  std::iota(o.begin(), o.end(), 0);
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return o;
}

}  // namespace detail

/// Projects both embeddings to one dimension and matches by rank. Ties in
/// the projection resolve by node index.
inline NodeMapping approx_nn_match(const FeatureMatrix& e, const FeatureMatrix& e_hat,
                                   ProjectionKind kind = ProjectionKind::PrincipalAxis) {
  require_shape(e.cols() == e_hat.cols(), "approx_nn_match: feature dimensions differ");
  require_shape(e.rows() == e_hat.rows(), "approx_nn_match: needs equally sized graphs (" +
                                              std::to_string(e.rows()) + " vs " + std::to_string(e_hat.rows()) +
                                              ")");
  if (!e.all_finite() || !e_hat.all_finite()) throw NumericError("approx_nn_match: non-finite embedding");
  NodeMapping out(MatcherKind::ApproxNN);
  if (e.rows() == 0) return out;
  const std::vector<double> axis =
      kind == ProjectionKind::PrincipalAxis ? detail::principal_axis(e, e_hat) : std::vector<double>{};
  const auto p = detail::project(e, kind, axis);
  const auto q = detail::project(e_hat, kind, axis);
  const auto op = detail::rank_order(p);
  const auto oq = detail::rank_order(q);
  for (std::size_t r = 0; r < op.size(); ++r) out.add(op[r], oq[r], std::abs(p[op[r]] - q[oq[r]]));
  return out;
}

/// Sum of D over the pairs of a mapping.
inline double assignment_cost(const DistanceMatrix& d, const NodeMapping& m) {
  double s = 0.0;
  for (const auto& p : m.pairs()) s += d(p.source, p.target);
  return s;
}

/// Runs the named matcher on two embeddings.
inline NodeMapping match_embeddings(MatcherKind kind, const FeatureMatrix& e, const FeatureMatrix& e_hat,
                                    ProjectionKind projection = ProjectionKind::PrincipalAxis) {
  switch (kind) {
    case MatcherKind::Greedy: return greedy_match(pairwise_distances(e, e_hat));
    case MatcherKind::Exact: return hungarian_exact(pairwise_distances(e, e_hat));
    case MatcherKind::ApproxNN: return approx_nn_match(e, e_hat, projection);
    case MatcherKind::GroundTruth: break;
  }
  throw InvalidArgument("ground_truth is not a matcher");
}

/// `src tgt distance` lines. Ids are translated through the tables when given.
inline void write_mapping(std::ostream& os, const NodeMapping& m, std::span<const std::int64_t> src_ids = {},
                          std::span<const std::int64_t> tgt_ids = {}) {
  os << "# matcher " << to_string(m.tag()) << '\n' << std::setprecision(17);
  for (const auto& p : m.pairs()) {
    if (src_ids.empty()) os << p.source; else os << src_ids[p.source];
    os << ' ';
    if (tgt_ids.empty()) os << p.target; else os << tgt_ids[p.target];
    if (p.distance) os << ' ' << *p.distance;
    os << '\n';
  }
}

}  // namespace tgae
