#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tgae/experiments.hpp"
#include "tgae/perturb.hpp"
#include "tgae/trainer.hpp"

namespace tgae {

using json = nlohmann::json;

/// Input files referenced by a run.
struct DataConfig {
  std::string name;                 ///< label used in reports
  std::string graph;                ///< evaluation / source graph
  std::string target;               ///< subgraph task: target graph
  std::string anchors;              ///< subgraph task: ground-truth pairs
  std::vector<std::string> family;  ///< training family
  std::string checkpoint;           ///< trained encoder for source "tgae"
};

/// Everything one CLI invocation needs. Every random component derives its
/// stream from `seed` under its own name.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t threads = 0;  ///< 0: TGAE_THREADS or hardware default
  DataConfig data;
  EncoderConfig encoder;
  TrainConfig train;
  PerturbationSpec perturbation;
  ExperimentConfig experiment;

  /// Pushes the root seed into the components.
  void propagate_seed() {
    encoder.seed = seed;
    train.seed = seed;
    perturbation.seed = seed;
    experiment.seed = seed;
    experiment.encoder = encoder;
    experiment.train = train;
  }
};

namespace detail {

/// Reads fields from one JSON object and rejects keys nobody asked for.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError("'" + path_ + "' must be an object", 0);
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ParseError("'" + path_ + "." + key + "': " + e.what(), 0);
    }
  }

  template <class Enum, class Parse>
  void get_enum(const char* key, Enum& out, Parse parse) {
    std::string s;
    get(key, s);
    if (j_.contains(key)) {
      try {
        out = parse(s);
      } catch (const InvalidArgument& e) {
        throw ParseError("'" + path_ + "." + key + "': " + e.what(), 0);
      }
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) throw ParseError("unknown key '" + path_ + "." + k + "'", 0);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline EgonetNeighborMode egonet_mode_from_string(const std::string& s) {
  if (s == "external_neighbors") return EgonetNeighborMode::ExternalNeighbors;
  if (s == "egonet_size") return EgonetNeighborMode::EgonetSize;
  throw InvalidArgument("unknown egonet mode '" + s + "' (expected external_neighbors|egonet_size)");
}

inline const char* to_string(EgonetNeighborMode m) {
  return m == EgonetNeighborMode::ExternalNeighbors ? "external_neighbors" : "egonet_size";
}

}  // namespace detail

/// Parses a run configuration. Missing keys keep their defaults; unknown
/// keys are a ParseError. A "seed" given inside a section overrides the
/// root seed for that section only.
inline RunConfig parse_run_config(const json& j) {
  RunConfig c;
  detail::StrictObject root(j, "config");
  root.get("seed", c.seed);
  root.get("output_dir", c.output_dir);
  root.get("threads", c.threads);
  c.propagate_seed();

  if (const json* d = root.child("data")) {
    detail::StrictObject o(*d, "data");
    o.get("name", c.data.name);
    o.get("graph", c.data.graph);
    o.get("target", c.data.target);
    o.get("anchors", c.data.anchors);
    o.get("family", c.data.family);
    o.get("checkpoint", c.data.checkpoint);
    o.finish();
  }
  if (const json* e = root.child("encoder")) {
    detail::StrictObject o(*e, "encoder");
    auto& x = c.encoder;
    o.get("input_dim", x.input_dim);
    o.get("hidden_dim", x.hidden_dim);
    o.get("num_layers", x.num_layers);
    o.get("mlp_in_hidden", x.mlp_in_hidden);
    o.get("mlp_out_hidden", x.mlp_out_hidden);
    o.get("output_dim", x.output_dim);
    o.get("propagation_hops", x.propagation_hops);
    o.get_enum("activation", x.activation, activation_from_string);
    o.get_enum("skip", x.skip, skip_mode_from_string);
    o.get("seed", x.seed);
    o.finish();
    try {
      x.validate();
    } catch (const InvalidArgument& err) {
      throw ParseError(std::string("encoder: ") + err.what(), 0);
    }
  }
  if (const json* t = root.child("train")) {
    detail::StrictObject o(*t, "train");
    auto& x = c.train;
    o.get("augmentations", x.augmentations);
    o.get_enum("model", x.model, perturbation_model_from_string);
    o.get("levels", x.levels);
    o.get("epochs", x.epochs);
    o.get_enum("optimizer", x.optimizer, optimizer_from_string);
    o.get("learning_rate", x.learning_rate);
    o.get("beta1", x.beta1);
    o.get("beta2", x.beta2);
    o.get("epsilon", x.epsilon);
    o.get_enum("schedule", x.schedule, step_schedule_from_string);
    o.get("dense_loss_limit", x.dense_loss_limit);
    o.get_enum("egonet_mode", x.egonet_mode, detail::egonet_mode_from_string);
    o.get("seed", x.seed);
    o.finish();
    try {
      x.validate();
    } catch (const InvalidArgument& err) {
      throw ParseError(std::string("train: ") + err.what(), 0);
    }
  }
  if (const json* p = root.child("perturbation")) {
    detail::StrictObject o(*p, "perturbation");
    auto& x = c.perturbation;
    o.get_enum("model", x.model, perturbation_model_from_string);
    o.get("level", x.level);
    o.get("recompute_degree_weights", x.recompute_degree_weights);
    o.get("seed", x.seed);
    o.finish();
  }
  if (const json* e = root.child("experiment")) {
    detail::StrictObject o(*e, "experiment");
    auto& x = c.experiment;
    o.get_enum("task", x.task, task_from_string);
    o.get_enum("source", x.source, embedding_source_from_string);
    o.get_enum("matcher", x.matcher, matcher_from_string);
    o.get_enum("projection", x.projection, projection_from_string);
    o.get_enum("model", x.model, perturbation_model_from_string);
    o.get("levels", x.levels);
    o.get("trials", x.trials);
    o.get("seed", x.seed);
    o.get("spectral_m", x.spectral.m);
    o.get("distinctness_tol", x.spectral.distinctness_tol);
    o.get_enum("egonet_mode", x.egonet_mode, detail::egonet_mode_from_string);
    o.get("hit_ks", x.hit_ks);
    o.finish();
    try {
      x.validate();
    } catch (const InvalidArgument& err) {
      throw ParseError(std::string("experiment: ") + err.what(), 0);
    }
  }
  root.finish();
  c.experiment.encoder = c.encoder;
  c.experiment.train = c.train;
  return c;
}

inline RunConfig read_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path + "' is not valid JSON: " + e.what(), 0);
  }
  return parse_run_config(j);
}

/// Fully resolved configuration, every field spelled out.
inline json to_json(const RunConfig& c) {
  const auto& e = c.encoder;
  const auto& t = c.train;
  const auto& p = c.perturbation;
  const auto& x = c.experiment;
  return json{
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"data",
       {{"name", c.data.name},
        {"graph", c.data.graph},
        {"target", c.data.target},
        {"anchors", c.data.anchors},
        {"family", c.data.family},
        {"checkpoint", c.data.checkpoint}}},
      {"encoder",
       {{"input_dim", e.input_dim},
        {"hidden_dim", e.hidden_dim},
        {"num_layers", e.num_layers},
        {"mlp_in_hidden", e.mlp_in_hidden},
        {"mlp_out_hidden", e.mlp_out_hidden},
        {"output_dim", e.output_dim},
        {"propagation_hops", e.propagation_hops},
        {"activation", to_string(e.activation)},
        {"skip", to_string(e.skip)},
        {"seed", e.seed}}},
      {"train",
       {{"augmentations", t.augmentations},
        {"model", to_string(t.model)},
        {"levels", t.levels},
        {"epochs", t.epochs},
        {"optimizer", to_string(t.optimizer)},
        {"learning_rate", t.learning_rate},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"epsilon", t.epsilon},
        {"schedule", to_string(t.schedule)},
        {"dense_loss_limit", t.dense_loss_limit},
        {"egonet_mode", detail::to_string(t.egonet_mode)},
        {"seed", t.seed}}},
      {"perturbation",
       {{"model", to_string(p.model)},
        {"level", p.level},
        {"recompute_degree_weights", p.recompute_degree_weights},
        {"seed", p.seed}}},
      {"experiment",
       {{"task", to_string(x.task)},
        {"source", to_string(x.source)},
        {"matcher", to_string(x.matcher)},
        {"projection", to_string(x.projection)},
        {"model", to_string(x.model)},
        {"levels", x.levels},
        {"trials", x.trials},
        {"seed", x.seed},
        {"spectral_m", x.spectral.m},
        {"distinctness_tol", x.spectral.distinctness_tol},
        {"egonet_mode", detail::to_string(x.egonet_mode)},
        {"hit_ks", x.hit_ks}}},
  };
}

}  // namespace tgae
