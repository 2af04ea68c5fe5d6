#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tgae/assignment.hpp"
#include "tgae/encoder.hpp"
#include "tgae/features.hpp"
#include "tgae/graph.hpp"
#include "tgae/parallel.hpp"
#include "tgae/perturb.hpp"
#include "tgae/trainer.hpp"

namespace tgae {

// ---------------------------------------------------------------------------
// Metrics

/// Fraction of ground-truth pairs reproduced by `pred`.
inline double matching_accuracy(const NodeMapping& pred, const NodeMapping& truth) {
  if (truth.empty()) throw InvalidArgument("matching_accuracy: ground truth is empty");
  std::size_t hit = 0;
  for (const auto& p : truth.pairs())
    if (pred.contains(p.source, p.target)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

struct HitsAtK {
  std::vector<std::size_t> ks;       ///< after clamping to the number of columns
  std::vector<double> fraction;      ///< parallel to ks
  std::vector<std::string> warnings;
};

/// For each truth pair (s, t): t's rank in row s counting strictly smaller
/// entries plus equal entries at lower column index. Hit@k iff rank < k.
inline HitsAtK hits_at_k(const DistanceMatrix& d, const NodeMapping& truth, const std::vector<std::size_t>& ks) {
  if (truth.empty()) throw InvalidArgument("hits_at_k: ground truth is empty");
  HitsAtK out;
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidArgument("hits_at_k: k must be >= 1");
    if (k > d.cols()) {
      out.warnings.push_back("Hit@" + std::to_string(k) + " clamped to " + std::to_string(d.cols()) +
                             " (number of target nodes)");
      k = d.cols();
    }
    out.ks.push_back(k);
  }
  std::vector<std::size_t> ranks;
  ranks.reserve(truth.size());
  for (const auto& p : truth.pairs()) {
    if (p.source >= d.rows() || p.target >= d.cols())
      throw InvalidArgument("hits_at_k: truth pair (" + std::to_string(p.source) + ", " + std::to_string(p.target) +
                            ") lies outside the " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                            " distance matrix");
    const double* row = d.data() + p.source * d.cols();
    const double ref = row[p.target];
    std::size_t rank = 0;
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (row[j] < ref || (row[j] == ref && j < p.target)) ++rank;
    ranks.push_back(rank);
  }
  for (std::size_t k : out.ks) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r < k; });
    out.fraction.push_back(static_cast<double>(hits) / static_cast<double>(ranks.size()));
  }
  return out;
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

inline Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(v.size()));
  return s;
}

// ---------------------------------------------------------------------------
// Embedding sources

enum class EmbeddingSource { NetSimile, Spectral, TGAE, TGAEUntrained, TGAESingle, GAE };

inline const char* to_string(EmbeddingSource s) {
  switch (s) {
    case EmbeddingSource::NetSimile: return "netsimile";
    case EmbeddingSource::Spectral: return "spectral";
    case EmbeddingSource::TGAE: return "tgae";
    case EmbeddingSource::TGAEUntrained: return "tgae_untrained";
    case EmbeddingSource::TGAESingle: return "tgae_single";
    case EmbeddingSource::GAE: return "gae";
  }
  return "?";
}

inline EmbeddingSource embedding_source_from_string(const std::string& s) {
  for (auto e : {EmbeddingSource::NetSimile, EmbeddingSource::Spectral, EmbeddingSource::TGAE,
                 EmbeddingSource::TGAEUntrained, EmbeddingSource::TGAESingle, EmbeddingSource::GAE})
    if (s == to_string(e)) return e;
  throw InvalidArgument("unknown embedding source '" + s +
                        "' (expected netsimile|spectral|tgae|tgae_untrained|tgae_single|gae)");
}

inline bool uses_encoder(EmbeddingSource s) {
  return s != EmbeddingSource::NetSimile && s != EmbeddingSource::Spectral;
}

struct PhaseTimes {
  double features = 0.0;   ///< seconds
  double inference = 0.0;
  double matching = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Maps a graph to node embeddings. Encoder-based sources need `params`.
struct Embedder {
  EmbeddingSource source = EmbeddingSource::NetSimile;
  SpectralConfig spectral;
  EgonetNeighborMode egonet_mode = EgonetNeighborMode::ExternalNeighbors;
  EncoderConfig encoder;
  std::optional<EncoderParams> params;

  FeatureMatrix operator()(const Graph& g, PhaseTimes* t = nullptr) const {
    detail::Stopwatch sw;
    if (source == EmbeddingSource::Spectral) {
      FeatureMatrix f = spectral_embedding(g, spectral).features;
      if (t) t->features += sw.seconds();
      return f;
    }
    FeatureMatrix x = standardize(netsimile_features(g, egonet_mode));
    if (t) t->features += sw.seconds();
    if (source == EmbeddingSource::NetSimile) return x;
    if (!params) throw InvalidArgument(std::string("embedding source ") + to_string(source) + " needs encoder parameters");
    detail::Stopwatch inf;
    FeatureMatrix z = encoder_forward(encoder, *params, normalize_adjacency(g), x);
    if (t) t->inference += inf.seconds();
    return z;
  }
};

namespace detail {

/// Spectral embeddings of two graphs can keep a different number of
/// gap-isolated eigenvectors; both are cut to the common leading columns.
inline void align_widths(FeatureMatrix& a, FeatureMatrix& b) {
  if (a.cols() == b.cols()) return;
  const std::size_t w = std::min(a.cols(), b.cols());
  auto cut = [w](const FeatureMatrix& m) {
    FeatureMatrix r(m.rows(), w);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < w; ++j) r(i, j) = m(i, j);
    return r;
  };
  a = cut(a);
  b = cut(b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reports

struct Condition {
  std::string label;  ///< variant or matcher name for grid reports
  PerturbationModel model = PerturbationModel::Uniform;
  double level = 0.0;
  std::vector<double> accuracy;             ///< one per trial
  std::vector<std::size_t> edge_disagreement;  ///< one per trial when the mapping is total
  std::vector<PhaseTimes> times;            ///< one per trial
  std::vector<std::size_t> hit_ks;
  std::vector<double> hits;                 ///< Hit@k fractions (subgraph task)

  Summary accuracy_summary() const { return summarize(accuracy); }
  PhaseTimes mean_times() const {
    PhaseTimes m;
    for (const auto& t : times) {
      m.features += t.features;
      m.inference += t.inference;
      m.matching += t.matching;
    }
    if (!times.empty()) {
      const double n = static_cast<double>(times.size());
      m.features /= n;
      m.inference /= n;
      m.matching /= n;
    }
    return m;
  }
};

enum class Task { GraphMatching, SubgraphMatching, Ablation, Benchmark };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::GraphMatching: return "graph_matching";
    case Task::SubgraphMatching: return "subgraph_matching";
    case Task::Ablation: return "ablation";
    case Task::Benchmark: return "benchmark";
  }
  return "?";
}

inline Task task_from_string(const std::string& s) {
  for (auto t : {Task::GraphMatching, Task::SubgraphMatching, Task::Ablation, Task::Benchmark})
    if (s == to_string(t)) return t;
  throw InvalidArgument("unknown task '" + s + "' (expected graph_matching|subgraph_matching|ablation|benchmark)");
}

struct ExperimentReport {
  Task task = Task::GraphMatching;
  std::string dataset;
  std::string source;
  std::string matcher;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<Condition> conditions;
  std::vector<std::string> warnings;
  double setup_seconds = 0.0;  ///< training or other one-off work

  /// First condition with this label and level, or nullptr.
  const Condition* find(const std::string& label, double level) const {
    for (const auto& c : conditions)
      if (c.label == label && c.level == level) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Drivers

struct ExperimentConfig {
  Task task = Task::GraphMatching;
  EmbeddingSource source = EmbeddingSource::NetSimile;
  MatcherKind matcher = MatcherKind::Greedy;
  ProjectionKind projection = ProjectionKind::PrincipalAxis;
  PerturbationModel model = PerturbationModel::Uniform;
  std::vector<double> levels = {0.0};
  std::size_t trials = 10;
  /// Trial t uses seed + t at every level, so levels share permutations.
  std::uint64_t seed = 0;
  SpectralConfig spectral;
  EgonetNeighborMode egonet_mode = EgonetNeighborMode::ExternalNeighbors;
  EncoderConfig encoder;
  TrainConfig train;  ///< for sources that train inside the run
  std::vector<std::size_t> hit_ks = {1, 5, 10, 50};

  void validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (levels.empty()) throw InvalidArgument("at least one perturbation level is required");
  }

  Embedder embedder(std::optional<EncoderParams> params = std::nullopt) const {
    Embedder e;
    e.source = source;
    e.spectral = spectral;
    e.egonet_mode = egonet_mode;
    e.encoder = encoder;
    e.params = std::move(params);
    return e;
  }
};

/// One permuted, perturbed copy S_hat = P (S + M) P^T and its ground truth.
struct TrialInstance {
  Graph perturbed;
  Permutation perm;
};

inline TrialInstance make_trial(const Graph& g, PerturbationModel model, double level, std::uint64_t trial_seed) {
  PerturbationSpec spec;
  spec.model = model;
  spec.level = level;
  spec.seed = derive_seed(trial_seed, "perturbation");
  Rng prng = make_rng(trial_seed, "permutation");
  Permutation perm = Permutation::random(g.num_nodes(), prng);
  return {permute(perturb(g, spec).graph, perm), std::move(perm)};
}

/// Graph matching against permuted, perturbed copies. `clean_embedding`
/// caches the embedding of g, which is the same in every trial.
inline std::vector<Condition> graph_matching_conditions(const Graph& g, const Embedder& embed,
                                                        const ExperimentConfig& cfg, const std::string& label,
                                                        const std::vector<MatcherKind>& matchers) {
  cfg.validate();
  PhaseTimes clean_times;
  const FeatureMatrix clean = embed(g, &clean_times);
  std::vector<Condition> out;
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    std::vector<Condition> per_matcher(matchers.size());
    for (std::size_t m = 0; m < matchers.size(); ++m) {
      auto& c = per_matcher[m];
      c.label = matchers.size() > 1 ? std::string(to_string(matchers[m])) : label;
      c.model = cfg.model;
      c.level = cfg.levels[li];
      c.accuracy.resize(cfg.trials);
      c.edge_disagreement.resize(cfg.trials);
      c.times.resize(cfg.trials);
    }
    // Trials run one after another when several matchers are timed against
    // each other; otherwise they are spread over the worker pool.
    auto run_trial = [&](std::size_t t) {
      const TrialInstance inst = make_trial(g, cfg.model, cfg.levels[li], cfg.seed + t);
      PhaseTimes times;
      FeatureMatrix e = clean;
      FeatureMatrix e_hat = embed(inst.perturbed, &times);
      detail::align_widths(e, e_hat);
      const NodeMapping truth = inst.perm.as_mapping();
      for (std::size_t m = 0; m < matchers.size(); ++m) {
        detail::Stopwatch sw;
        const NodeMapping pred = match_embeddings(matchers[m], e, e_hat, cfg.projection);
        PhaseTimes tm = times;
        tm.matching = sw.seconds();
        auto& c = per_matcher[m];
        c.accuracy[t] = matching_accuracy(pred, truth);
        c.edge_disagreement[t] = edge_disagreement(g, inst.perturbed, pred);
        c.times[t] = tm;
      }
    };
    if (matchers.size() > 1) {
      for (std::size_t t = 0; t < cfg.trials; ++t) run_trial(t);
    } else {
      parallel_for(cfg.trials, run_trial);
    }
    for (auto& c : per_matcher) out.push_back(std::move(c));
  }
  return out;
}

inline ExperimentReport run_graph_matching(const ExperimentConfig& cfg, const Graph& g, const std::string& dataset,
                                           std::optional<EncoderParams> params = std::nullopt) {
  cfg.validate();
  ExperimentReport rep;
  rep.task = Task::GraphMatching;
  rep.dataset = dataset;
  rep.source = to_string(cfg.source);
  rep.matcher = to_string(cfg.matcher);
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  detail::Stopwatch setup;
  if (cfg.source == EmbeddingSource::TGAE && !params)
    throw InvalidArgument("embedding source tgae needs a trained checkpoint");
  if (cfg.source == EmbeddingSource::TGAEUntrained) params = EncoderParams::init(cfg.encoder);
  if (cfg.source == EmbeddingSource::TGAESingle || cfg.source == EmbeddingSource::GAE) {
    TrainConfig tc = cfg.train;
    tc.augmentations = 0;
    params = train({g}, cfg.encoder, tc).params;
  }
  rep.setup_seconds = setup.seconds();
  rep.conditions = graph_matching_conditions(g, cfg.embedder(std::move(params)), cfg, rep.source, {cfg.matcher});
  return rep;
}

/// Matcher grid on one untrained encoder: every matcher sees the same
/// embeddings in every trial.
inline ExperimentReport run_benchmark(const ExperimentConfig& cfg, const Graph& g, const std::string& dataset,
                                      const std::vector<MatcherKind>& matchers = {MatcherKind::ApproxNN,
                                                                                  MatcherKind::Greedy,
                                                                                  MatcherKind::Exact}) {
  cfg.validate();
  ExperimentReport rep;
  rep.task = Task::Benchmark;
  rep.dataset = dataset;
  rep.source = to_string(EmbeddingSource::TGAEUntrained);
  rep.matcher = "grid";
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  ExperimentConfig c = cfg;
  c.source = EmbeddingSource::TGAEUntrained;
  rep.conditions = graph_matching_conditions(g, c.embedder(EncoderParams::init(cfg.encoder)), c, rep.source, matchers);
  return rep;
}

/// Compares encoder variants under one matching protocol:
///   tgae            trained on `family` with augmentation (or `trained` if given)
///   tgae_single     trained on the evaluation graph alone, no augmentation
///   tgae_untrained  random initialization
///   gae             trained on `family` without augmentation
/// Within each level, conditions are ordered by mean accuracy, best first.
inline ExperimentReport run_ablation(const ExperimentConfig& cfg, const Graph& g, const std::string& dataset,
                                     const std::vector<Graph>& family,
                                     std::optional<EncoderParams> trained = std::nullopt) {
  cfg.validate();
  ExperimentReport rep;
  rep.task = Task::Ablation;
  rep.dataset = dataset;
  rep.source = "variants";
  rep.matcher = to_string(cfg.matcher);
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;

  detail::Stopwatch setup;
  TrainConfig plain = cfg.train;
  plain.augmentations = 0;
  const std::vector<Graph>& fam = family.empty() ? std::vector<Graph>{g} : family;
  std::vector<std::pair<EmbeddingSource, EncoderParams>> variants;
  variants.emplace_back(EmbeddingSource::TGAE, trained ? *trained : train(fam, cfg.encoder, cfg.train).params);
  variants.emplace_back(EmbeddingSource::TGAESingle, train({g}, cfg.encoder, plain).params);
  variants.emplace_back(EmbeddingSource::TGAEUntrained, EncoderParams::init(cfg.encoder));
  variants.emplace_back(EmbeddingSource::GAE, train(fam, cfg.encoder, plain).params);
  rep.setup_seconds = setup.seconds();

  std::vector<Condition> all;
  for (auto& [src, p] : variants) {
    ExperimentConfig c = cfg;
    c.source = src;
    for (auto& cond : graph_matching_conditions(g, c.embedder(std::move(p)), c, to_string(src), {cfg.matcher}))
      all.push_back(std::move(cond));
  }
  for (double level : cfg.levels) {
    std::vector<Condition> at;
    for (auto& c : all)
      if (c.level == level) at.push_back(c);
    std::stable_sort(at.begin(), at.end(), [](const Condition& a, const Condition& b) {
      return a.accuracy_summary().mean > b.accuracy_summary().mean;
    });
    for (auto& c : at) rep.conditions.push_back(std::move(c));
  }
  return rep;
}

/// Rectangular matching between two graphs with a partial ground truth.
/// Encoder sources share one encoder over both graphs; if no parameters are
/// supplied for `tgae`, one is trained on {src, tgt} first.
inline ExperimentReport run_subgraph_matching(const ExperimentConfig& cfg, const Graph& src, const Graph& tgt,
                                              const NodeMapping& anchors, const std::string& dataset,
                                              std::optional<EncoderParams> params = std::nullopt) {
  cfg.validate();
  if (anchors.empty()) throw InvalidArgument("subgraph matching needs at least one anchor pair");
  for (const auto& p : anchors.pairs())
    if (p.source >= src.num_nodes() || p.target >= tgt.num_nodes())
      throw InvalidArgument("anchor (" + std::to_string(p.source) + ", " + std::to_string(p.target) +
                            ") is outside the graphs (" + std::to_string(src.num_nodes()) + " and " +
                            std::to_string(tgt.num_nodes()) + " nodes)");
  ExperimentReport rep;
  rep.task = Task::SubgraphMatching;
  rep.dataset = dataset;
  rep.source = to_string(cfg.source);
  rep.matcher = to_string(cfg.matcher);
  rep.trials = 1;
  rep.seed = cfg.seed;

  detail::Stopwatch setup;
  if (cfg.source == EmbeddingSource::TGAE && !params) params = train({src, tgt}, cfg.encoder, cfg.train).params;
  if (cfg.source == EmbeddingSource::TGAEUntrained) params = EncoderParams::init(cfg.encoder);
  if (cfg.source == EmbeddingSource::TGAESingle || cfg.source == EmbeddingSource::GAE) {
    TrainConfig tc = cfg.train;
    tc.augmentations = 0;
    params = train({src, tgt}, cfg.encoder, tc).params;
  }
  rep.setup_seconds = setup.seconds();
  const Embedder embed = cfg.embedder(std::move(params));

  Condition c;
  c.label = rep.source;
  c.level = 0.0;
  PhaseTimes times;
  FeatureMatrix e = embed(src, &times);
  FeatureMatrix e_hat = embed(tgt, &times);
  detail::align_widths(e, e_hat);
  detail::Stopwatch sw;
  const DistanceMatrix d = pairwise_distances(e, e_hat);
  const NodeMapping pred = cfg.matcher == MatcherKind::Exact      ? hungarian_exact(d)
                           : cfg.matcher == MatcherKind::ApproxNN ? approx_nn_match(e, e_hat, cfg.projection)
                                                                  : greedy_match(d);
  times.matching = sw.seconds();
  const HitsAtK hk = hits_at_k(d, anchors, cfg.hit_ks);
  c.accuracy.push_back(matching_accuracy(pred, anchors));
  c.times.push_back(times);
  c.hit_ks = hk.ks;
  c.hits = hk.fraction;
  rep.warnings = hk.warnings;
  rep.conditions.push_back(std::move(c));
  return rep;
}

}  // namespace tgae
