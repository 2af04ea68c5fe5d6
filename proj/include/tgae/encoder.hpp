#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tgae/features.hpp"
#include "tgae/graph.hpp"
#include "tgae/matrix.hpp"
#include "tgae/rng.hpp"

namespace tgae {

enum class Activation { ReLU, Tanh };

/// How the input-MLP output h0 enters each message-passing layer.
enum class SkipMode {
  Additive,  ///< S h^{l-1} + h0
  Gated,     ///< S h^{l-1} + sigmoid(g^l) * h0, g^l a learned per-channel gate
};

inline const char* to_string(Activation a) { return a == Activation::ReLU ? "relu" : "tanh"; }
inline const char* to_string(SkipMode s) { return s == SkipMode::Additive ? "additive" : "gated"; }

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "tanh") return Activation::Tanh;
  throw InvalidArgument("unknown nonlinearity '" + s + "' (expected relu|tanh)");
}

inline SkipMode skip_mode_from_string(const std::string& s) {
  if (s == "additive") return SkipMode::Additive;
  if (s == "gated") return SkipMode::Gated;
  throw InvalidArgument("unknown skip mode '" + s + "' (expected additive|gated)");
}

struct EncoderConfig {
  std::size_t input_dim = kNetSimileFeatures;
  std::size_t hidden_dim = 64;      ///< width c of every message-passing layer
  std::size_t num_layers = 3;       ///< L
  std::size_t mlp_in_hidden = 64;
  std::size_t mlp_out_hidden = 64;
  std::size_t output_dim = 64;
  /// Powers of S summed in each layer: S + ... + S^hops. 1 is plain GIN.
  std::size_t propagation_hops = 1;
  Activation activation = Activation::ReLU;
  SkipMode skip = SkipMode::Additive;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_layers < 1) throw InvalidArgument("encoder needs at least one message-passing layer");
    if (input_dim == 0 || hidden_dim == 0 || mlp_in_hidden == 0 || mlp_out_hidden == 0 ||
        output_dim == 0 || propagation_hops == 0)
      throw InvalidArgument("encoder dimensions must be positive");
  }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// One named weight matrix or bias row of the encoder.
struct ParamBlock {
  std::string name;
  Matrix value;
};

/// All trainable weights in a fixed declaration order, addressable by a
/// flat scalar index. The same type holds gradients.
class EncoderParams {
 public:
  EncoderParams() = default;

  /// Zero-initialized parameters with the shapes implied by `cfg`.
  static EncoderParams zeros(const EncoderConfig& cfg) {
    cfg.validate();
    EncoderParams p;
    const std::size_t c = cfg.hidden_dim;
    p.add("in.w1", cfg.input_dim, cfg.mlp_in_hidden);
    p.add("in.b1", 1, cfg.mlp_in_hidden);
    p.add("in.w2", cfg.mlp_in_hidden, c);
    p.add("in.b2", 1, c);
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
      const std::string pre = "mp" + std::to_string(l);
      p.add(pre + ".w", c, c);
      p.add(pre + ".b", 1, c);
      if (cfg.skip == SkipMode::Gated) p.add(pre + ".gate", 1, c);
    }
    p.add("out.w1", cfg.num_layers * c, cfg.mlp_out_hidden);
    p.add("out.b1", 1, cfg.mlp_out_hidden);
    p.add("out.w2", cfg.mlp_out_hidden, cfg.output_dim);
    p.add("out.b2", 1, cfg.output_dim);
    return p;
  }

  /// Glorot-uniform weights, zero biases and gates, drawn from cfg.seed.
  static EncoderParams init(const EncoderConfig& cfg) {
    EncoderParams p = zeros(cfg);
    Rng rng = make_rng(cfg.seed, "init");
    for (auto& b : p.blocks_) {
      if (b.value.rows() == 1) continue;  // bias rows and gates
      const double a = std::sqrt(6.0 / static_cast<double>(b.value.rows() + b.value.cols()));
      std::uniform_real_distribution<double> u(-a, a);
      for (auto& v : b.value.values()) v = u(rng);
    }
    return p;
  }

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  ParamBlock& block(std::size_t i) { return blocks_[i]; }
  const ParamBlock& block(std::size_t i) const { return blocks_[i]; }
  std::vector<ParamBlock>& blocks() noexcept { return blocks_; }
  const std::vector<ParamBlock>& blocks() const noexcept { return blocks_; }

  const Matrix& get(const std::string& name) const { return blocks_[index(name)].value; }
  Matrix& get(const std::string& name) { return blocks_[index(name)].value; }
  bool has(const std::string& name) const {
    for (const auto& b : blocks_)
      if (b.name == name) return true;
    return false;
  }

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& b : blocks_) s += b.value.size();
    return s;
  }

  double& at(std::size_t flat) {
    auto [b, k] = locate(flat);
    return blocks_[b].value.values()[k];
  }
  double at(std::size_t flat) const {
    auto [b, k] = locate(flat);
    return blocks_[b].value.values()[k];
  }

  /// Name of the block containing scalar `flat`.
  const std::string& block_name_of(std::size_t flat) const { return blocks_[locate(flat).first].name; }

  bool all_finite() const {
    for (const auto& b : blocks_)
      if (!b.value.all_finite()) return false;
    return true;
  }

  void set_zero() {
    for (auto& b : blocks_) b.value.fill(0.0);
  }

  void scale(double s) {
    for (auto& b : blocks_) b.value *= s;
  }

  /// this += s * other (same layout)
  void axpy(double s, const EncoderParams& other) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      auto& a = blocks_[i].value.values();
      const auto& o = other.blocks_[i].value.values();
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += s * o[k];
    }
  }

  friend bool operator==(const EncoderParams& a, const EncoderParams& b) {
    if (a.blocks_.size() != b.blocks_.size()) return false;
    for (std::size_t i = 0; i < a.blocks_.size(); ++i)
      if (a.blocks_[i].name != b.blocks_[i].name || !(a.blocks_[i].value == b.blocks_[i].value))
        return false;
    return true;
  }

 private:
  void add(std::string name, std::size_t rows, std::size_t cols) {
    blocks_.push_back({std::move(name), Matrix(rows, cols)});
  }

  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].name == name) return i;
    throw InvalidArgument("no parameter block named '" + name + "'");
  }

  std::pair<std::size_t, std::size_t> locate(std::size_t flat) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (flat < blocks_[i].value.size()) return {i, flat};
      flat -= blocks_[i].value.size();
    }
    throw InvalidArgument("flat parameter index out of range");
  }

  std::vector<ParamBlock> blocks_;
};

namespace detail {

inline double activate(Activation a, double x) {
  return a == Activation::ReLU ? (x > 0 ? x : 0.0) : std::tanh(x);
}

/// Derivative expressed through the pre-activation.
inline double activate_grad(Activation a, double pre) {
  if (a == Activation::ReLU) return pre > 0 ? 1.0 : 0.0;
  const double t = std::tanh(pre);
  return 1.0 - t * t;
}

inline Matrix apply_activation(Activation a, const Matrix& pre) {
  Matrix out(pre.rows(), pre.cols());
  for (std::size_t k = 0; k < pre.size(); ++k) out.values()[k] = activate(a, pre.values()[k]);
  return out;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix y = matmul(x, w);
  add_row_vector(y, b.values());
  return y;
}

inline void check_finite(const Matrix& m, const std::string& where) {
  if (!m.all_finite()) throw NumericError("non-finite activation in " + where);
}

}  // namespace detail

/// Intermediate values of one forward pass, kept for the backward pass.
struct EncoderTrace {
  Matrix x;                    ///< input features
  Matrix in_pre;               ///< x W1 + b1
  Matrix in_hidden;            ///< sigma(in_pre)
  Matrix h0;                   ///< input-MLP output
  std::vector<Matrix> agg;     ///< per-layer aggregated messages
  std::vector<Matrix> pre;     ///< per-layer agg W + b
  std::vector<Matrix> h;       ///< per-layer outputs h^1..h^L
  std::vector<std::vector<double>> gate;  ///< sigmoid(gate) per layer (gated skip)
  Matrix concat;
  Matrix out_pre;
  Matrix out_hidden;
  Matrix z;
};

/// T-GAE encoder: input MLP, L sum-aggregation layers with a skip from the
/// input MLP into every layer, and an output MLP over the concatenation of
/// all layer outputs. Permutation equivariant in (S, X).
class Encoder {
 public:
  explicit Encoder(EncoderConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const EncoderConfig& config() const noexcept { return cfg_; }

  void check_params(const EncoderParams& p) const {
    const EncoderParams ref = EncoderParams::zeros(cfg_);
    if (p.num_blocks() != ref.num_blocks())
      throw ShapeError("parameter set has " + std::to_string(p.num_blocks()) + " blocks, config expects " +
                       std::to_string(ref.num_blocks()));
    for (std::size_t i = 0; i < ref.num_blocks(); ++i) {
      const auto& a = p.block(i);
      const auto& b = ref.block(i);
      if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols())
        throw ShapeError("parameter block '" + a.name + "' (" + std::to_string(a.value.rows()) + "x" +
                         std::to_string(a.value.cols()) + ") does not match expected '" + b.name + "' (" +
                         std::to_string(b.value.rows()) + "x" + std::to_string(b.value.cols()) + ")");
    }
  }

  EncoderTrace forward_trace(const EncoderParams& p, const SparseOperator& s, const FeatureMatrix& x) const {
    check_params(p);
    require_shape(x.rows() == s.dim(), "encoder: feature rows (" + std::to_string(x.rows()) +
                                           ") differ from operator dimension (" + std::to_string(s.dim()) + ")");
    require_shape(x.cols() == cfg_.input_dim, "encoder: feature width " + std::to_string(x.cols()) +
                                                  " but encoder expects " + std::to_string(cfg_.input_dim));
    const Activation act = cfg_.activation;
    EncoderTrace t;
    t.x = x;
    t.in_pre = detail::affine(x, p.get("in.w1"), p.get("in.b1"));
    t.in_hidden = detail::apply_activation(act, t.in_pre);
    t.h0 = detail::affine(t.in_hidden, p.get("in.w2"), p.get("in.b2"));
    detail::check_finite(t.h0, "input MLP");

    const Matrix* prev = &t.h0;
    t.agg.reserve(cfg_.num_layers);
    t.pre.reserve(cfg_.num_layers);
    t.h.reserve(cfg_.num_layers);
    for (std::size_t l = 0; l < cfg_.num_layers; ++l) {
      const std::string pre = "mp" + std::to_string(l);
      Matrix agg = propagate(s, *prev);
      if (cfg_.skip == SkipMode::Gated) {
        std::vector<double> gate(cfg_.hidden_dim);
        const auto& g = p.get(pre + ".gate").values();
        for (std::size_t j = 0; j < gate.size(); ++j) gate[j] = detail::sigmoid(g[j]);
        for (std::size_t i = 0; i < agg.rows(); ++i)
          for (std::size_t j = 0; j < agg.cols(); ++j) agg(i, j) += gate[j] * t.h0(i, j);
        t.gate.push_back(std::move(gate));
      } else {
        agg += t.h0;
      }
      Matrix z = detail::affine(agg, p.get(pre + ".w"), p.get(pre + ".b"));
      Matrix h = detail::apply_activation(act, z);
      detail::check_finite(h, "message-passing layer " + std::to_string(l + 1));
      t.agg.push_back(std::move(agg));
      t.pre.push_back(std::move(z));
      t.h.push_back(std::move(h));
      prev = &t.h.back();
    }
    t.concat = hconcat(t.h);
    t.out_pre = detail::affine(t.concat, p.get("out.w1"), p.get("out.b1"));
    t.out_hidden = detail::apply_activation(act, t.out_pre);
    t.z = detail::affine(t.out_hidden, p.get("out.w2"), p.get("out.b2"));
    detail::check_finite(t.z, "output MLP");
    return t;
  }

  FeatureMatrix forward(const EncoderParams& p, const SparseOperator& s, const FeatureMatrix& x) const {
    return forward_trace(p, s, x).z;
  }

  /// Reverse-mode gradient of a scalar objective given dObjective/dz.
  EncoderParams backward(const EncoderParams& p, const SparseOperator& s, const EncoderTrace& t,
                         const Matrix& dz) const {
    require_shape(dz.rows() == t.z.rows() && dz.cols() == t.z.cols(), "backward: dz shape mismatch");
    const Activation act = cfg_.activation;
    EncoderParams grad = EncoderParams::zeros(cfg_);

    // Output MLP.
    grad.get("out.w2") = matmul_tn(t.out_hidden, dz);
    grad.get("out.b2").values() = column_sums(dz);
    Matrix d_out_pre = matmul_nt(dz, p.get("out.w2"));
    mask_by_activation(act, t.out_pre, d_out_pre);
    grad.get("out.w1") = matmul_tn(t.concat, d_out_pre);
    grad.get("out.b1").values() = column_sums(d_out_pre);
    const Matrix d_concat = matmul_nt(d_out_pre, p.get("out.w1"));

    const std::size_t c = cfg_.hidden_dim;
    const std::size_t n = t.z.rows();
    std::vector<Matrix> dh(cfg_.num_layers, Matrix(n, c));
    for (std::size_t l = 0; l < cfg_.num_layers; ++l)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) dh[l](i, j) = d_concat(i, l * c + j);

    Matrix dh0(n, c);
    for (std::size_t l = cfg_.num_layers; l-- > 0;) {
      const std::string pre = "mp" + std::to_string(l);
      Matrix dpre = dh[l];
      mask_by_activation(act, t.pre[l], dpre);
      grad.get(pre + ".w") = matmul_tn(t.agg[l], dpre);
      grad.get(pre + ".b").values() = column_sums(dpre);
      const Matrix dagg = matmul_nt(dpre, p.get(pre + ".w"));

      if (cfg_.skip == SkipMode::Gated) {
        auto& dg = grad.get(pre + ".gate").values();
        const auto& gate = t.gate[l];
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < c; ++j) {
            dh0(i, j) += dagg(i, j) * gate[j];
            dg[j] += dagg(i, j) * t.h0(i, j) * gate[j] * (1.0 - gate[j]);
          }
      } else {
        dh0 += dagg;
      }
      Matrix dprev = propagate_transpose(s, dagg);
      if (l == 0)
        dh0 += dprev;
      else
        dh[l - 1] += dprev;
    }

    // Input MLP.
    grad.get("in.w2") = matmul_tn(t.in_hidden, dh0);
    grad.get("in.b2").values() = column_sums(dh0);
    Matrix d_in_pre = matmul_nt(dh0, p.get("in.w2"));
    mask_by_activation(act, t.in_pre, d_in_pre);
    grad.get("in.w1") = matmul_tn(t.x, d_in_pre);
    grad.get("in.b1").values() = column_sums(d_in_pre);

    if (!grad.all_finite()) throw NumericError("non-finite gradient");
    return grad;
  }

 private:
  Matrix propagate(const SparseOperator& s, const Matrix& h) const {
    Matrix power = s.apply(h);
    Matrix sum = power;
    for (std::size_t k = 1; k < cfg_.propagation_hops; ++k) {
      power = s.apply(power);
      sum += power;
    }
    return sum;
  }

  Matrix propagate_transpose(const SparseOperator& s, const Matrix& d) const {
    Matrix power = s.apply_transpose(d);
    Matrix sum = power;
    for (std::size_t k = 1; k < cfg_.propagation_hops; ++k) {
      power = s.apply_transpose(power);
      sum += power;
    }
    return sum;
  }

  static void mask_by_activation(Activation act, const Matrix& pre, Matrix& d) {
    for (std::size_t k = 0; k < d.size(); ++k) d.values()[k] *= detail::activate_grad(act, pre.values()[k]);
  }

  EncoderConfig cfg_;
};

/// Convenience: phi(X; S, params).
inline FeatureMatrix encoder_forward(const EncoderConfig& cfg, const EncoderParams& params,
                                     const SparseOperator& s, const FeatureMatrix& x) {
  return Encoder(cfg).forward(params, s, x);
}

/// Standardized NetSimile features, the encoder's default input.
inline FeatureMatrix encoder_input(const Graph& g, EgonetNeighborMode mode = EgonetNeighborMode::ExternalNeighbors) {
  return standardize(netsimile_features(g, mode));
}

/// Embeds a graph with the encoder on its own normalized adjacency.
inline FeatureMatrix embed_graph(const EncoderConfig& cfg, const EncoderParams& params, const Graph& g,
                                 EgonetNeighborMode mode = EgonetNeighborMode::ExternalNeighbors) {
  return encoder_forward(cfg, params, normalize_adjacency(g), encoder_input(g, mode));
}

}  // namespace tgae
