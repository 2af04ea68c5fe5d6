#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tgae/encoder.hpp"
#include "tgae/loss.hpp"
#include "tgae/parallel.hpp"
#include "tgae/perturb.hpp"
#include "tgae/rng.hpp"

namespace tgae {

enum class OptimizerKind { SGD, Adam };

inline const char* to_string(OptimizerKind k) { return k == OptimizerKind::SGD ? "sgd" : "adam"; }

inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::SGD;
  if (s == "adam") return OptimizerKind::Adam;
  throw InvalidArgument("unknown optimizer '" + s + "' (expected sgd|adam)");
}

/// When the accumulated gradient is applied.
enum class StepSchedule {
  PerRound,  ///< once per augmentation round: J steps per epoch
  PerEpoch,  ///< once per epoch over every graph and augmentation
};

inline const char* to_string(StepSchedule s) { return s == StepSchedule::PerRound ? "round" : "epoch"; }

inline StepSchedule step_schedule_from_string(const std::string& s) {
  if (s == "round") return StepSchedule::PerRound;
  if (s == "epoch") return StepSchedule::PerEpoch;
  throw InvalidArgument("unknown step schedule '" + s + "' (expected round|epoch)");
}

struct TrainConfig {
  /// Augmented copies of each graph per epoch. 0 trains on the clean graphs.
  std::size_t augmentations = 10;
  PerturbationModel model = PerturbationModel::Uniform;
  /// Each augmentation draws its level uniformly from this list.
  std::vector<double> levels = {0.0, 0.01, 0.05};
  std::size_t epochs = 20;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  StepSchedule schedule = StepSchedule::PerRound;
  /// Graphs above this size use the sampled loss instead of the dense N^2 one.
  std::size_t dense_loss_limit = 5000;
  EgonetNeighborMode egonet_mode = EgonetNeighborMode::ExternalNeighbors;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be > 0");
    if (augmentations > 0 && levels.empty()) throw InvalidArgument("augmentation needs at least one level");
    for (double p : levels)
      if (!(p >= 0) || !std::isfinite(p)) throw InvalidArgument("augmentation levels must be >= 0");
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && epsilon > 0))
      throw InvalidArgument("invalid Adam hyper-parameters");
  }
};

struct TrainResult {
  EncoderParams params;
  std::vector<double> epoch_loss;  ///< mean loss per epoch
  std::size_t steps = 0;
};

/// Loss became non-finite. Carries the parameters from before the failing step.
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(const std::string& what, EncoderParams last_good, std::size_t epoch)
      : NumericError(what), last_good_(std::move(last_good)), epoch_(epoch) {}
  const EncoderParams& last_good() const noexcept { return last_good_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  EncoderParams last_good_;
  std::size_t epoch_;
};

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, const EncoderParams& shape)
      : cfg_(cfg), m_(shape), v_(shape) {
    m_.set_zero();
    v_.set_zero();
  }

  void step(EncoderParams& p, const EncoderParams& grad) {
    ++t_;
    if (cfg_.optimizer == OptimizerKind::SGD) {
      p.axpy(-cfg_.learning_rate, grad);
      return;
    }
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      auto& w = p.block(b).value.values();
      const auto& g = grad.block(b).value.values();
      auto& m = m_.block(b).value.values();
      auto& v = v_.block(b).value.values();
      for (std::size_t k = 0; k < w.size(); ++k) {
        m[k] = cfg_.beta1 * m[k] + (1 - cfg_.beta1) * g[k];
        v[k] = cfg_.beta2 * v[k] + (1 - cfg_.beta2) * g[k] * g[k];
        w[k] -= cfg_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg_.epsilon);
      }
    }
  }

 private:
  TrainConfig cfg_;
  EncoderParams m_, v_;
  std::uint64_t t_ = 0;
};

namespace detail {

struct TrainSample {
  SparseOperator s;
  FeatureMatrix x;
};

inline TrainSample augmented_sample(const Graph& g, const TrainConfig& cfg, std::size_t epoch, std::size_t graph,
                                    std::size_t round) {
  if (cfg.augmentations == 0) return {normalize_adjacency(g), encoder_input(g, cfg.egonet_mode)};
  // One stream per (epoch, graph, round) so samples are independent of
  // evaluation order.
  const std::uint64_t index = (static_cast<std::uint64_t>(epoch) << 40) ^
                              (static_cast<std::uint64_t>(graph) << 20) ^ round;
  Rng rng = make_rng(cfg.seed, "augmentation", index);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.levels.size() - 1);
  PerturbationSpec spec;
  spec.model = cfg.model;
  spec.level = cfg.levels[pick(rng)];
  spec.seed = rng();
  const Graph aug = perturb(g, spec).graph;
  return {normalize_adjacency(aug), encoder_input(aug, cfg.egonet_mode)};
}

}  // namespace detail

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Trains one encoder over a family of graphs by reconstructing each clean
/// graph from randomly perturbed copies of itself.
inline TrainResult train(const std::vector<Graph>& family, const EncoderConfig& enc_cfg, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}, const EncoderParams* start = nullptr) {
  if (family.empty()) throw InvalidArgument("training family is empty");
  cfg.validate();
  const Encoder enc(enc_cfg);
  TrainResult res;
  res.params = start ? *start : EncoderParams::init(enc_cfg);
  enc.check_params(res.params);
  Optimizer opt(cfg, res.params);

  const std::size_t rounds = std::max<std::size_t>(cfg.augmentations, 1);
  const std::size_t per_round = family.size();
  EncoderParams acc = EncoderParams::zeros(enc_cfg);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_sum = 0.0;
    acc.set_zero();
    std::size_t acc_count = 0;
    for (std::size_t r = 0; r < rounds; ++r) {
      std::vector<SampleGradient> out(per_round);
      try {
      parallel_for(per_round, [&](std::size_t i) {
        const Graph& g = family[i];
        auto sample = detail::augmented_sample(g, cfg, epoch, i, r);
        if (g.num_nodes() <= cfg.dense_loss_limit) {
          out[i] = loss_gradient(enc, res.params, sample.s, sample.x, g);
        } else {
          const auto t = enc.forward_trace(res.params, sample.s, sample.x);
          Rng rng = make_rng(cfg.seed, "negative-sampling",
                             (static_cast<std::uint64_t>(epoch) << 40) ^ (i << 20) ^ r);
          auto lg = sampled_reconstruction_loss_and_grad(t.z, g, rng);
          out[i] = {lg.loss, enc.backward(res.params, sample.s, t, lg.dz)};
        }
      });
      } catch (const NumericError& e) {
        throw TrainingDiverged(std::string(e.what()) + " in epoch " + std::to_string(epoch + 1), res.params,
                               epoch);
      }
      for (auto& o : out) {
        if (!std::isfinite(o.loss))
          throw TrainingDiverged("training loss became non-finite in epoch " + std::to_string(epoch + 1),
                                 res.params, epoch);
        epoch_sum += o.loss;
        acc.axpy(1.0, o.grad);
        ++acc_count;
      }
      const bool step_now = cfg.schedule == StepSchedule::PerRound || r + 1 == rounds;
      if (step_now) {
        acc.scale(1.0 / static_cast<double>(acc_count));
        EncoderParams prev = res.params;
        opt.step(res.params, acc);
        ++res.steps;
        if (!res.params.all_finite())
          throw TrainingDiverged("parameters became non-finite in epoch " + std::to_string(epoch + 1),
                                 std::move(prev), epoch);
        acc.set_zero();
        acc_count = 0;
      }
    }
    const double mean = epoch_sum / static_cast<double>(rounds * per_round);
    res.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return res;
}

/// `epoch,mean_loss` CSV.
inline void write_loss_trace(std::ostream& os, const std::vector<double>& epoch_loss) {
  os << "epoch,mean_loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < epoch_loss.size(); ++e) os << e + 1 << ',' << epoch_loss[e] << '\n';
}

}  // namespace tgae
