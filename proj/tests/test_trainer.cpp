#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tgae/generators.hpp"
#include "tgae/trainer.hpp"

using namespace tgae;

namespace {

EncoderConfig tiny_encoder(std::uint64_t seed = 1) {
  EncoderConfig c;
  c.hidden_dim = 12;
  c.mlp_in_hidden = 12;
  c.mlp_out_hidden = 12;
  c.output_dim = 8;
  c.num_layers = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Train, CleanGraphLossFallsBelowLn2) {
  const Graph g = gen::clustered_scale_free(60, 180, 3);
  TrainConfig cfg;
  cfg.augmentations = 0;
  cfg.epochs = 200;
  cfg.learning_rate = 3e-2;
  cfg.seed = 4;
  const auto r = train({g}, tiny_encoder(), cfg);
  ASSERT_EQ(r.epoch_loss.size(), 200u);
  EXPECT_EQ(r.steps, 200u);
  EXPECT_LT(r.epoch_loss.back(), std::numbers::ln2);
  // Non-increasing on average: each 50-epoch window beats the one before.
  for (std::size_t w = 1; w < 4; ++w) {
    double prev = 0, cur = 0;
    for (std::size_t e = 0; e < 50; ++e) {
      prev += r.epoch_loss[(w - 1) * 50 + e];
      cur += r.epoch_loss[w * 50 + e];
    }
    EXPECT_LT(cur, prev) << "window " << w;
  }
  // The logged loss is the loss of the parameters before each step.
  EXPECT_NEAR(r.epoch_loss.front(),
              reconstruction_loss(embed_graph(tiny_encoder(), EncoderParams::init(tiny_encoder()), g), g), 1e-12);
}

TEST(Train, AugmentedFamilyIsBitReproducible) {
  const std::vector<Graph> family = {gen::clustered_scale_free(40, 100, 1), gen::clustered_scale_free(30, 70, 2)};
  TrainConfig cfg;
  cfg.augmentations = 3;
  cfg.epochs = 3;
  cfg.seed = 11;
  const auto a = train(family, tiny_encoder(), cfg);
  set_thread_count(1);
  const auto b = train(family, tiny_encoder(), cfg);
  set_thread_count(0);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  EXPECT_EQ(a.steps, 9u);

  cfg.seed = 12;
  EXPECT_NE(train(family, tiny_encoder(), cfg).epoch_loss, a.epoch_loss);
}

TEST(Train, PerEpochScheduleStepsOncePerEpoch) {
  TrainConfig cfg;
  cfg.augmentations = 4;
  cfg.epochs = 2;
  cfg.schedule = StepSchedule::PerEpoch;
  const auto r = train({gen::cycle(12)}, tiny_encoder(), cfg);
  EXPECT_EQ(r.steps, 2u);
}

TEST(Train, SampledLossAboveDenseLimit) {
  TrainConfig cfg;
  cfg.augmentations = 0;
  cfg.epochs = 2;
  cfg.dense_loss_limit = 10;
  const auto r = train({gen::clustered_scale_free(40, 90, 5)}, tiny_encoder(), cfg);
  for (double l : r.epoch_loss) EXPECT_TRUE(std::isfinite(l));
}

TEST(Train, CallbackSeesEveryEpoch) {
  TrainConfig cfg;
  cfg.augmentations = 1;
  cfg.epochs = 4;
  std::vector<std::size_t> seen;
  train({gen::cycle(10)}, tiny_encoder(), cfg, [&](std::size_t e, double) { seen.push_back(e); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4}));
}

TEST(Train, DivergenceKeepsLastFiniteParameters) {
  TrainConfig cfg;
  cfg.augmentations = 0;
  cfg.epochs = 50;
  cfg.optimizer = OptimizerKind::SGD;
  cfg.learning_rate = 1e150;
  try {
    train({gen::clustered_scale_free(30, 60, 1)}, tiny_encoder(), cfg);
    FAIL() << "expected TrainingDiverged";
  } catch (const TrainingDiverged& e) {
    EXPECT_TRUE(e.last_good().all_finite());
    EXPECT_LT(e.epoch(), 50u);
  }
}

TEST(Train, RejectsBadConfig) {
  TrainConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(train({gen::cycle(5)}, tiny_encoder(), cfg), InvalidArgument);
  EXPECT_THROW(train({}, tiny_encoder(), TrainConfig{}), InvalidArgument);
  TrainConfig empty_levels;
  empty_levels.levels.clear();
  EXPECT_THROW(train({gen::cycle(5)}, tiny_encoder(), empty_levels), InvalidArgument);
}

TEST(Train, AdamStepMatchesHandComputation) {
  // First Adam step moves every coordinate by lr * g / (|g| + eps').
  EncoderConfig c = tiny_encoder();
  EncoderParams p = EncoderParams::zeros(c), g = EncoderParams::zeros(c);
  g.at(0) = 0.5;
  g.at(1) = -2.0;
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  Optimizer opt(cfg, p);
  opt.step(p, g);
  EXPECT_NEAR(p.at(0), -0.1, 1e-7);
  EXPECT_NEAR(p.at(1), 0.1, 1e-7);
  EXPECT_EQ(p.at(2), 0.0);
}

TEST(Train, LossTraceCsv) {
  std::ostringstream os;
  write_loss_trace(os, {0.5, 0.25});
  EXPECT_EQ(os.str(), "epoch,mean_loss\n1,0.5\n2,0.25\n");
}
