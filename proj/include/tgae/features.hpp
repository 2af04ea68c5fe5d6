#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "tgae/eigen.hpp"
#include "tgae/graph.hpp"
#include "tgae/matrix.hpp"

namespace tgae {

/// N x F node features or embeddings; row i belongs to node i.
using FeatureMatrix = Matrix;

// ---------------------------------------------------------------------------
// NetSimile

/// Reading of the seventh NetSimile column.
enum class EgonetNeighborMode {
  ExternalNeighbors,  ///< distinct nodes outside the egonet adjacent to it
  EgonetSize,         ///< number of nodes in the egonet
};

constexpr std::size_t kNetSimileFeatures = 7;

/// Seven egonet features per node, columns in order:
/// degree, clustering coefficient, mean neighbor degree, mean neighbor
/// clustering, egonet edges, egonet outgoing edges, egonet neighbors.
inline FeatureMatrix netsimile_features(const Graph& g,
                                        EgonetNeighborMode mode = EgonetNeighborMode::ExternalNeighbors) {
  const std::size_t n = g.num_nodes();
  FeatureMatrix f(n, kNetSimileFeatures);

  // Triangles through each node via neighbor marking.
  std::vector<std::size_t> triangles(n, 0);
  std::vector<std::size_t> mark(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u : g.neighbors(v)) mark[u] = v;
    std::size_t links = 0;
    for (std::size_t u : g.neighbors(v))
      for (std::size_t w : g.neighbors(u))
        if (mark[w] == v) ++links;
    triangles[v] = links / 2;
  }

  std::vector<double> clustering(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const double d = static_cast<double>(g.degree(v));
    if (g.degree(v) >= 2) clustering[v] = static_cast<double>(triangles[v]) / (d * (d - 1.0) / 2.0);
  }

  std::fill(mark.begin(), mark.end(), n);
  std::vector<std::size_t> outside(n, n);
  std::vector<double> cc;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t d = g.degree(v);
    f(v, 0) = static_cast<double>(d);
    f(v, 1) = clustering[v];
    if (d == 0) continue;  // isolated: all zeros

    std::size_t ego_degree_sum = d;
    mark[v] = v;
    cc.clear();
    for (std::size_t u : g.neighbors(v)) {
      cc.push_back(clustering[u]);
      ego_degree_sum += g.degree(u);
      mark[u] = v;
    }
    // Summed in sorted order so the result does not depend on labels.
    std::sort(cc.begin(), cc.end());
    double cc_sum = 0.0;
    for (double c : cc) cc_sum += c;
    f(v, 2) = static_cast<double>(ego_degree_sum - d) / static_cast<double>(d);
    f(v, 3) = cc_sum / static_cast<double>(d);

    // Egonet = v plus neighbors. Internal edges: d star edges plus the
    // triangles closing over v.
    const std::size_t internal = d + triangles[v];
    f(v, 4) = static_cast<double>(internal);
    f(v, 5) = static_cast<double>(ego_degree_sum - 2 * internal);

    if (mode == EgonetNeighborMode::EgonetSize) {
      f(v, 6) = static_cast<double>(d + 1);
    } else {
      std::size_t external = 0;
      for (std::size_t u : g.neighbors(v))
        for (std::size_t w : g.neighbors(u))
          if (mark[w] != v && outside[w] != v) {
            outside[w] = v;
            ++external;
          }
      f(v, 6) = static_cast<double>(external);
    }
  }
  return f;
}

/// Column-wise z-score over the node set. Constant columns become zero.
inline FeatureMatrix standardize(const FeatureMatrix& x) {
  FeatureMatrix out(x.rows(), x.cols());
  if (x.rows() == 0) return out;
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(var / n);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = sd > 1e-12 ? (x(i, j) - mean) / sd : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral

struct SpectralConfig {
  std::size_t m = 4;
  /// Minimum gap to the nearest other eigenvalue, relative to the spectral
  /// range (max - min eigenvalue).
  double distinctness_tol = 1e-6;
};

struct SpectralEmbedding {
  FeatureMatrix features;               ///< N x m', absolute eigenvector entries
  std::vector<double> eigenvalues;      ///< selected, descending
  std::vector<std::size_t> eig_indices; ///< positions in the ascending spectrum
  double max_residual = 0.0;            ///< max ||S v - lambda v||_inf over selected pairs
};

/// Indices (into the ascending spectrum) of eigenvalues whose gap to every
/// other eigenvalue exceeds `abs_tol`.
inline std::vector<char> isolated_eigenvalues(const std::vector<double>& values, double abs_tol) {
  const std::size_t n = values.size();
  std::vector<char> ok(n, 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && values[k] - values[k - 1] <= abs_tol) ok[k] = 0;
    if (k + 1 < n && values[k + 1] - values[k] <= abs_tol) ok[k] = 0;
  }
  return ok;
}

inline double absolute_tolerance(const std::vector<double>& ascending, double relative_tol) {
  if (ascending.empty()) return relative_tol;
  const double range = ascending.back() - ascending.front();
  return relative_tol * (range > 0 ? range : 1.0);
}

/// |V_m|: absolute values of the eigenvectors of the normalized adjacency
/// for (up to) the m largest eigenvalues that are not repeated.
inline SpectralEmbedding spectral_embedding(const Graph& g, const SpectralConfig& cfg = {}) {
  const std::size_t n = g.num_nodes();
  if (cfg.m < 1 || cfg.m > n)
    throw InvalidArgument("spectral_embedding: m must lie in [1, N], got " + std::to_string(cfg.m));
  if (!(cfg.distinctness_tol > 0)) throw InvalidArgument("spectral_embedding: tolerance must be > 0");
  const Matrix s = normalize_adjacency(g).to_dense();
  const SymmetricEigen eig = symmetric_eigen(s);
  const auto ok = isolated_eigenvalues(eig.values, absolute_tolerance(eig.values, cfg.distinctness_tol));

  SpectralEmbedding out;
  for (std::size_t k = n; k-- > 0 && out.eig_indices.size() < cfg.m;)
    if (ok[k]) out.eig_indices.push_back(k);
  out.features = FeatureMatrix(n, out.eig_indices.size());
  for (std::size_t c = 0; c < out.eig_indices.size(); ++c) {
    const std::size_t k = out.eig_indices[c];
    out.eigenvalues.push_back(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) out.features(i, c) = std::abs(eig.vectors(i, k));
    out.max_residual = std::max(out.max_residual, eigen_residual(s, eig, k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization: "TGAEFEAT" | u32 version | u64 rows | u64 cols | f64 row-major

inline constexpr char kFeatureMagic[8] = {'T', 'G', 'A', 'E', 'F', 'E', 'A', 'T'};
inline constexpr std::uint32_t kFeatureVersion = 1;

namespace detail {

template <class T>
void write_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T read_le(std::istream& is, const char* what) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw FormatError(std::string("truncated file while reading ") + what);
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_features(std::ostream& os, const FeatureMatrix& x) {
  os.write(kFeatureMagic, sizeof kFeatureMagic);
  detail::write_le<std::uint32_t>(os, kFeatureVersion);
  detail::write_le<std::uint64_t>(os, x.rows());
  detail::write_le<std::uint64_t>(os, x.cols());
  for (double v : x.values()) detail::write_le<double>(os, v);
}

inline FeatureMatrix read_features(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kFeatureMagic, sizeof magic) != 0)
    throw FormatError("not a feature matrix file (bad magic)");
  const auto version = detail::read_le<std::uint32_t>(is, "version");
  if (version != kFeatureVersion)
    throw FormatError("feature matrix version " + std::to_string(version) + " is not supported");
  const auto rows = detail::read_le<std::uint64_t>(is, "rows");
  const auto cols = detail::read_le<std::uint64_t>(is, "cols");
  FeatureMatrix x(rows, cols);
  for (auto& v : x.values()) v = detail::read_le<double>(is, "matrix data");
  return x;
}

inline void write_features_csv(std::ostream& os, const FeatureMatrix& x) {
  os << "node";
  for (std::size_t j = 0; j < x.cols(); ++j) os << ",f" << j;
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    os << i;
    for (std::size_t j = 0; j < x.cols(); ++j) os << ',' << x(i, j);
    os << '\n';
  }
}

}  // namespace tgae
