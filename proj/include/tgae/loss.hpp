#pragma once

#include <cmath>
#include <random>
#include <unordered_set>
#include <vector>

#include "tgae/encoder.hpp"
#include "tgae/graph.hpp"
#include "tgae/matrix.hpp"
#include "tgae/rng.hpp"

namespace tgae {

/// rho(z z^T), exactly symmetric.
inline Matrix decode_scores(const FeatureMatrix& z) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zi = z.data() + i * d;
    for (std::size_t j = i; j < n; ++j) {
      const double* zj = z.data() + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += zi[k] * zj[k];
      p(i, j) = p(j, i) = detail::sigmoid(s);
    }
  }
  return p;
}

namespace detail {

/// -[a log rho(x) + (1-a) log(1 - rho(x))], stable in x.
inline double bce_with_logit(double x, double a) {
  const double softplus = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return softplus - a * x;
}

}  // namespace detail

/// Loss value together with dLoss/dz.
struct LossAndGradient {
  double loss = 0.0;
  Matrix dz;
};

/// Mean binary cross-entropy over all N^2 ordered pairs between rho(z z^T)
/// and the 0/1 adjacency of `target` (self-pairs labelled 0).
inline LossAndGradient reconstruction_loss_and_grad(const FeatureMatrix& z, const Graph& target) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  require_shape(n == target.num_nodes(), "reconstruction loss: embedding has " + std::to_string(n) +
                                             " rows but target graph has " +
                                             std::to_string(target.num_nodes()) + " nodes");
  const double inv = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  Matrix g(n, n);  // dLoss/dlogit, symmetric
  double total = 0.0;
  std::vector<char> adj_row(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t u : target.neighbors(i)) adj_row[u] = 1;
    const double* zi = z.data() + i * d;
    for (std::size_t j = i; j < n; ++j) {
      const double* zj = z.data() + j * d;
      double x = 0.0;
      for (std::size_t k = 0; k < d; ++k) x += zi[k] * zj[k];
      const double a = adj_row[j] ? 1.0 : 0.0;
      const double l = detail::bce_with_logit(x, a);
      const double gij = (detail::sigmoid(x) - a) * inv;
      total += (i == j ? 1.0 : 2.0) * l;
      g(i, j) = g(j, i) = gij;
    }
    for (std::size_t u : target.neighbors(i)) adj_row[u] = 0;
  }
  LossAndGradient out;
  out.loss = total * inv;
  // d/dz of sum_ij g_ij z_i.z_j = (G + G^T) z = 2 G z
  out.dz = matmul(g, z);
  out.dz *= 2.0;
  return out;
}

inline double reconstruction_loss(const FeatureMatrix& z, const Graph& target) {
  return reconstruction_loss_and_grad(z, target).loss;
}

/// Sampled estimator for graphs too large for the dense N^2 loss: every
/// ordered edge pair plus an equal number of uniformly drawn ordered
/// non-edge pairs, averaged.
inline LossAndGradient sampled_reconstruction_loss_and_grad(const FeatureMatrix& z, const Graph& target,
                                                            Rng& rng) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  require_shape(n == target.num_nodes(), "sampled reconstruction loss: size mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  for (auto [u, v] : target.edges()) {
    pos.emplace_back(u, v);
    pos.emplace_back(v, u);
  }
  std::vector<std::pair<std::size_t, std::size_t>> neg;
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  const std::size_t want = std::max<std::size_t>(pos.size(), 1);
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * n;
  const std::size_t limit = pairs > 2 * target.num_edges() ? want : 0;
  while (neg.size() < limit) {
    const std::size_t u = node(rng), v = node(rng);
    if (!target.has_edge(u, v)) neg.emplace_back(u, v);
  }
  LossAndGradient out;
  out.dz = Matrix(n, d);
  const double inv = 1.0 / static_cast<double>(pos.size() + neg.size());
  auto visit = [&](std::size_t u, std::size_t v, double a) {
    const double* zu = z.data() + u * d;
    const double* zv = z.data() + v * d;
    double x = 0.0;
    for (std::size_t k = 0; k < d; ++k) x += zu[k] * zv[k];
    out.loss += detail::bce_with_logit(x, a) * inv;
    const double gx = (detail::sigmoid(x) - a) * inv;
    for (std::size_t k = 0; k < d; ++k) {
      out.dz(u, k) += gx * zv[k];
      out.dz(v, k) += gx * zu[k];
    }
  };
  for (auto [u, v] : pos) visit(u, v, 1.0);
  for (auto [u, v] : neg) visit(u, v, 0.0);
  return out;
}

/// Objective value and exact parameter gradient for one (operator, features,
/// reconstruction target) sample.
struct SampleGradient {
  double loss = 0.0;
  EncoderParams grad;
};

inline SampleGradient loss_gradient(const Encoder& enc, const EncoderParams& params, const SparseOperator& s,
                                    const FeatureMatrix& x, const Graph& target) {
  const auto t = enc.forward_trace(params, s, x);
  LossAndGradient lg = reconstruction_loss_and_grad(t.z, target);
  if (!std::isfinite(lg.loss)) throw NumericError("non-finite reconstruction loss");
  return {lg.loss, enc.backward(params, s, t, lg.dz)};
}

}  // namespace tgae
