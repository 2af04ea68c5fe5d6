#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tgae/eigen.hpp"
#include "tgae/features.hpp"
#include "tgae/graph.hpp"
#include "tgae/rng.hpp"

namespace tgae {

struct FilterRecoveryConfig {
  std::size_t eig_index = 0;       ///< rank of the eigenvalue, 0 = largest
  std::size_t num_samples = 100000;
  std::uint64_t seed = 0;
  double distinctness_tol = 1e-6;  ///< relative, as in SpectralConfig
  std::size_t max_distinct = 24;   ///< cap on the polynomial order
  double max_condition = 1e10;     ///< Vandermonde condition number limit
};

/// Empirical check that a polynomial graph filter passing a single
/// eigenvalue, applied to white noise and squared, has expectation equal to
/// the squared entries of that eigenvector.
struct FilterRecoveryReport {
  double eigenvalue = 0.0;
  std::vector<double> distinct_eigenvalues;  ///< ascending cluster centres
  std::vector<double> taps;                  ///< h_0..h_{q-1}
  double condition_number = 0.0;
  std::vector<double> estimate;              ///< sample mean of y
  std::vector<double> truth;                 ///< |v|^2
  std::vector<double> std_error;             ///< per-coordinate Monte-Carlo standard error
  double max_abs_deviation = 0.0;
  double max_z = 0.0;                        ///< max |estimate - truth| / std_error
};

namespace detail {

/// Dense solve with partial pivoting.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) throw NumericError("singular linear system");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

inline double condition_number(const Matrix& w) {
  const auto eig = symmetric_eigen(matmul_tn(w, w));
  const double lo = std::max(eig.values.front(), 0.0);
  const double hi = eig.values.back();
  return lo > 0 ? std::sqrt(hi / lo) : INFINITY;
}

}  // namespace detail

inline FilterRecoveryReport verify_band_filter_recovery(const Graph& g, const FilterRecoveryConfig& cfg) {
  const std::size_t n = g.num_nodes();
  if (cfg.num_samples < 2) throw InvalidArgument("filter recovery needs at least 2 samples");
  const SparseOperator s = normalize_adjacency(g);
  const SymmetricEigen eig = symmetric_eigen(s.to_dense());
  if (cfg.eig_index >= n) throw InvalidArgument("eigenvalue index out of range");
  const std::size_t k = n - 1 - cfg.eig_index;
  const double tol = absolute_tolerance(eig.values, cfg.distinctness_tol);
  if (!isolated_eigenvalues(eig.values, tol)[k])
    throw InvalidArgument("eigenvalue " + std::to_string(eig.values[k]) +
                          " is repeated within tolerance; the filter cannot isolate its eigenvector");

  FilterRecoveryReport rep;
  rep.eigenvalue = eig.values[k];

  // Cluster the spectrum into distinct values.
  std::size_t target = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    double sum = eig.values[i];
    while (j < n && eig.values[j] - eig.values[j - 1] <= tol) sum += eig.values[j++];
    if (k >= i && k < j) target = rep.distinct_eigenvalues.size();
    rep.distinct_eigenvalues.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  const std::size_t q = rep.distinct_eigenvalues.size();
  if (q > cfg.max_distinct)
    throw NumericError("graph has " + std::to_string(q) + " distinct eigenvalues (cap " +
                       std::to_string(cfg.max_distinct) +
                       "); use a smaller graph or fewer distinct eigenvalues");

  Matrix w(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    double p = 1.0;
    for (std::size_t c = 0; c < q; ++c, p *= rep.distinct_eigenvalues[i]) w(i, c) = p;
  }
  rep.condition_number = detail::condition_number(w);
  if (!(rep.condition_number <= cfg.max_condition))
    throw NumericError("Vandermonde system is ill-conditioned (condition number " +
                       std::to_string(rep.condition_number) +
                       "); use fewer distinct eigenvalues or a smaller graph");
  std::vector<double> unit(q, 0.0);
  unit[target] = 1.0;
  rep.taps = detail::solve_linear(w, unit);

  rep.truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) rep.truth[i] = eig.vectors(i, k) * eig.vectors(i, k);

  // Fixed-size chunks, each with its own stream, so results do not depend
  // on how chunks are scheduled.
  constexpr std::size_t kChunk = 4096;
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  std::vector<double> x(n), f(n);
  for (std::size_t start = 0, chunk = 0; start < cfg.num_samples; start += kChunk, ++chunk) {
    Rng rng = make_rng(cfg.seed, "filter-recovery", chunk);
    std::normal_distribution<double> white(0.0, 1.0);
    const std::size_t stop = std::min(cfg.num_samples, start + kChunk);
    for (std::size_t t = start; t < stop; ++t) {
      for (auto& xi : x) xi = white(rng);
      // Horner: f = sum_k h_k S^k x
      for (std::size_t i = 0; i < n; ++i) f[i] = rep.taps[q - 1] * x[i];
      for (std::size_t c = q - 1; c-- > 0;) {
        f = s.apply(std::span<const double>(f));
        for (std::size_t i = 0; i < n; ++i) f[i] += rep.taps[c] * x[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double y = f[i] * f[i];
        sum[i] += y;
        sumsq[i] += y * y;
      }
    }
  }
  const double t = static_cast<double>(cfg.num_samples);
  rep.estimate.resize(n);
  rep.std_error.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = sum[i] / t;
    const double var = std::max(0.0, (sumsq[i] - t * mean * mean) / (t - 1.0));
    rep.estimate[i] = mean;
    rep.std_error[i] = std::sqrt(var / t);
    const double dev = std::abs(mean - rep.truth[i]);
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
    if (rep.std_error[i] > 0) rep.max_z = std::max(rep.max_z, dev / rep.std_error[i]);
  }
  return rep;
}

}  // namespace tgae
