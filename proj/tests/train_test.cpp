#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "sketchvos/dataio/synthetic.hpp"
#include "sketchvos/model/checkpoint.hpp"
#include "sketchvos/train/train.hpp"

using namespace sketchvos;
using namespace sketchvos::model;
namespace fs = std::filesystem;

namespace {

EncoderConfig tiny_encoder() {
  EncoderConfig e;
  e.widths = {4, 4, 8, 8};
  e.key_dim = 4;
  e.value_dim = 8;
  return e;
}

ModelConfig tiny_model(Design design = Design::cross_q) {
  ModelConfig cfg;
  cfg.encoder = tiny_encoder();
  cfg.fusion.design = design;
  cfg.fusion.channels = 8;
  if (design == Design::convweight) cfg.fusion.sketch_level = SketchLevel::gap;
  return cfg;
}

Mask square(int n, int y0, int x0, int s) {
  Mask m(n, n);
  for (int y = y0; y < std::min(n, y0 + s); ++y)
    for (int x = x0; x < std::min(n, x0 + s); ++x) m.at(y, x) = 1;
  return m;
}

dataio::TrainingClip random_clip(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  dataio::TrainingClip clip;
  clip.sequence = "t";
  clip.object_id = 1;
  clip.indices = {0, 1, 2};
  std::uniform_int_distribution<int> byte(0, 255);
  for (int k = 0; k < 3; ++k) {
    RgbImage img(n, n);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(byte(rng));
    clip.frames[k] = std::move(img);
    clip.masks[k] = square(n, 3 + k, 4 + k, n / 2);
  }
  clip.reference = square(n, 5, 6, n / 3);
  return clip;
}

template <typename T>
void zero_head(Model<T>& m) {
  m.head.c2.w.mutable_value().fill(0);
  m.head.c2.b.mutable_value().fill(0);
}

std::vector<Tensor<float>> snapshot(Model<float>& m) {
  std::vector<Tensor<float>> out;
  for (const auto& np : m.parameters()) out.push_back(np.param->value());
  return out;
}

class TinyDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "sketchvos_train_test";
    fs::remove_all(root_);
    dataio::SynthConfig cfg;
    cfg.n_sequences = 4;
    cfg.n_val_sequences = 2;
    cfg.frames_per_seq = 6;
    cfg.height = cfg.width = 32;
    dataio::gen_synthetic(cfg, 3, root_ / "data");
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static train::TrainConfig config(const std::string& out, int steps) {
    train::TrainConfig tc;
    tc.model = tiny_model();
    tc.steps = steps;
    tc.batch_size = 2;
    tc.seed = 5;
    tc.eval_every = 0;
    tc.log_every = 1;
    tc.data = root_ / "data";
    tc.out_dir = root_ / out;
    return tc;
  }

  static fs::path root_;
};

fs::path TinyDataset::root_;

}  // namespace

TEST(TrainConfig, PresetsAndValidation) {
  EXPECT_DOUBLE_EQ(train::lr_preset("paper"), 1e-5);
  EXPECT_DOUBLE_EQ(train::lr_preset("toy"), 1e-4);
  EXPECT_THROW(train::lr_preset("fast"), ConfigError);
  train::TrainConfig tc;
  EXPECT_NO_THROW(tc.validate());
  tc.lr = 0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = {};
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = {};
  tc.flip_prob = 1.5;
  EXPECT_THROW(tc.validate(), ConfigError);
}

TEST(Loss, ZeroHeadGivesLn2) {
  for (Design d : {Design::concat, Design::cross_kv, Design::cross_q}) {
    Model<double> m(tiny_model(d), 1);
    zero_head(m);
    const double loss = train::clip_loss(m, random_clip(32, 2)).value()[0];
    EXPECT_NEAR(loss, std::log(2.0), 1e-4) << to_string(d);
  }
}

TEST(Loss, PerfectPredictionIsClampFloor) {
  std::array<Mask, 3> masks{square(8, 1, 1, 4), square(8, 2, 2, 4), square(8, 3, 3, 4)};
  std::vector<numerics::Var<double>> probs;
  for (const auto& m : masks) probs.emplace_back(mask_tensor<double>(m).reshaped({8, 8}));
  EXPECT_LE(train::supervised_loss(probs, masks, true).value()[0], 1.2e-6);
}

TEST(Loss, FirstFrameExcludedWhenUnsupervised) {
  std::array<Mask, 3> masks{square(8, 1, 1, 4), square(8, 2, 2, 4), square(8, 3, 3, 4)};
  std::vector<numerics::Var<double>> probs;
  for (const auto& m : masks) probs.emplace_back(mask_tensor<double>(m).reshaped({8, 8}));
  probs[0] = numerics::Var<double>(Tensor<double>({8, 8}, 0.5));
  EXPECT_LE(train::supervised_loss(probs, masks, false).value()[0], 1.2e-6);
  EXPECT_NEAR(train::supervised_loss(probs, masks, true).value()[0], std::log(2.0) / 3, 1e-5);
}

TEST(Loss, ClipDirectionalDerivativeMatchesBackprop) {
  for (Design d : {Design::concat, Design::convweight, Design::cross_kv, Design::cross_q}) {
    Model<double> m(tiny_model(d), 9);
    auto params = m.parameters();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> bias(-0.3, 0.3);
    for (auto& np : params)
      if (np.name.ends_with(".b"))
        for (auto& v : np.param->mutable_value().values()) v = bias(rng);
    const auto clip = random_clip(16, 6);
    auto loss = train::clip_loss(m, clip);
    loss.backward();
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Tensor<double>> dir;
      double analytic = 0;
      for (auto& np : params) {
        Tensor<double> t(np.param->shape());
        for (auto& v : t.values()) v = normal(rng);
        const auto g = np.param->gradient();
        for (std::size_t i = 0; i < t.size(); ++i) analytic += g[i] * t[i];
        dir.push_back(std::move(t));
      }
      auto shifted = [&](double h) {
        for (std::size_t p = 0; p < params.size(); ++p)
          for (std::size_t i = 0; i < dir[p].size(); ++i) params[p].param->mutable_value()[i] += h * dir[p][i];
        numerics::NoGradGuard guard;
        const double v = train::clip_loss(m, clip).value()[0];
        for (std::size_t p = 0; p < params.size(); ++p)
          for (std::size_t i = 0; i < dir[p].size(); ++i) params[p].param->mutable_value()[i] -= h * dir[p][i];
        return v;
      };
      const double eps = 1e-6;
      const double numeric = (shifted(eps) - shifted(-eps)) / (2 * eps);
      EXPECT_NEAR(analytic, numeric, 1e-4 * std::max(std::abs(analytic), 1e-3)) << to_string(d) << " trial " << trial;
    }
  }
}

TEST(TrainStep, GradientReachesEveryParameter) {
  for (Design d : {Design::concat, Design::convweight, Design::cross_kv, Design::cross_q}) {
    Model<float> m(tiny_model(d), 3);
    const auto clip = random_clip(32, 8);
    auto loss = train::clip_loss(m, clip);
    loss.backward();
    for (const auto& np : m.parameters()) {
      double norm = 0;
      const auto grad = np.param->gradient();
      for (float g : grad.values()) norm += std::abs(g);
      EXPECT_GT(norm, 0.0) << to_string(d) << " " << np.name;
    }
  }
}

TEST(TrainStep, Deterministic) {
  Model<float> a(tiny_model(), 4), b(tiny_model(), 4);
  const std::vector<dataio::TrainingClip> batch{random_clip(32, 1), random_clip(32, 2)};
  numerics::AdamConfig adam;
  adam.lr = 1e-3;
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(train::train_step(a, batch, adam), train::train_step(b, batch, adam));
  }
  const auto pa = snapshot(a), pb = snapshot(b);
  for (std::size_t i = 0; i < pa.size(); ++i)
    EXPECT_TRUE(std::ranges::equal(pa[i].values(), pb[i].values())) << i;
}

TEST(TrainStep, RepeatedBatchLossMostlyDecreases) {
  Model<float> m(tiny_model(), 11);
  const std::vector<dataio::TrainingClip> batch{random_clip(32, 3)};
  numerics::AdamConfig adam;
  adam.lr = 1e-4;
  std::vector<double> losses;
  for (int s = 0; s < 200; ++s) losses.push_back(train::train_step(m, batch, adam));
  int down = 0;
  for (std::size_t i = 1; i < losses.size(); ++i) down += losses[i] < losses[i - 1];
  EXPECT_GE(down, static_cast<int>(0.9 * (losses.size() - 1)));
  EXPECT_LT(losses.back(), losses.front());
}

TEST(TrainStep, NonFiniteLossLeavesParametersUntouched) {
  Model<float> m(tiny_model(), 12);
  m.head.c2.b.mutable_value().fill(std::nanf(""));
  const auto before = snapshot(m);
  numerics::AdamConfig adam;
  EXPECT_THROW(train::train_step(m, {random_clip(32, 4)}, adam), DivergenceError);
  const auto after = snapshot(m);
  for (std::size_t i = 0; i < before.size(); ++i) {
    for (std::size_t k = 0; k < before[i].size(); ++k) {
      const float x = before[i][k], y = after[i][k];
      EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y)));
    }
  }
}

TEST(LossWindows, RunningAndInitial) {
  std::vector<double> losses(150);
  for (std::size_t i = 0; i < losses.size(); ++i) losses[i] = static_cast<double>(i);
  EXPECT_DOUBLE_EQ(train::initial_loss(losses), 9.5);
  EXPECT_DOUBLE_EQ(train::running_loss(losses), 99.5);
  EXPECT_DOUBLE_EQ(train::running_loss({1.0, 3.0}), 2.0);
}

TEST(ClipSourceTest, SamplesAdmissibleClips) {
  dataio::SynthConfig cfg;
  cfg.n_sequences = 2;
  cfg.frames_per_seq = 8;
  cfg.height = cfg.width = 32;
  const fs::path root = fs::temp_directory_path() / "sketchvos_clip_source";
  fs::remove_all(root);
  dataio::gen_synthetic(cfg, 1, root);
  const train::ClipSource source(dataio::load_dataset(root, dataio::Split::train), refgen::ReferenceKind::sketch, 3);
  EXPECT_EQ(source.objects(), 4u);
  std::mt19937_64 rng(0);
  for (int i = 0; i < 50; ++i) {
    const auto clip = source.sample(rng, 0.5);
    EXPECT_EQ(clip.indices[0], 0);
    EXPECT_LT(clip.indices[1], clip.indices[2]);
    EXPECT_LE(clip.indices[2] - clip.indices[1], 3);
    EXPECT_EQ(clip.frames[0].height(), 32);
  }
  fs::remove_all(root);
}

TEST_F(TinyDataset, OneStepWritesCheckpointAndLog) {
  const auto tc = config("one", 1);
  const auto r = train::fit(tc);
  EXPECT_EQ(r.steps_run, 1);
  ASSERT_EQ(r.losses.size(), 1u);
  EXPECT_TRUE(fs::exists(r.last_checkpoint));
  EXPECT_TRUE(fs::exists(tc.out_dir / "train.log"));
  EXPECT_TRUE(r.initial_val_jf.has_value());
  const auto ck = read_checkpoint(r.last_checkpoint);
  EXPECT_EQ(ck.state.at("step").get<int>(), 1);
  for (const auto& rec : ck.params) EXPECT_EQ(rec.adam_step, 1) << rec.name;
}

TEST_F(TinyDataset, ResumeMatchesUninterruptedRun) {
  const auto full = train::fit(config("full", 4));
  const auto half = train::fit(config("split", 2));
  const auto rest = train::fit(config("split", 4), half.last_checkpoint);
  EXPECT_EQ(rest.steps_run, 2);
  ASSERT_EQ(rest.losses.size(), full.losses.size());
  for (std::size_t i = 0; i < full.losses.size(); ++i) EXPECT_NEAR(rest.losses[i], full.losses[i], 1e-6);
  const auto a = read_checkpoint(full.last_checkpoint), b = read_checkpoint(rest.last_checkpoint);
  ASSERT_EQ(a.params.size(), b.params.size());
  double diff = 0;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    for (std::size_t k = 0; k < a.params[i].value.size(); ++k)
      diff = std::max(diff, static_cast<double>(std::abs(a.params[i].value[k] - b.params[i].value[k])));
  EXPECT_LE(diff, 1e-6);
}

TEST_F(TinyDataset, ResumeRejectsChangedConfig) {
  const auto half = train::fit(config("cfg", 1));
  auto other = config("cfg", 2);
  other.lr = 5e-4;
  EXPECT_THROW(train::fit(other, half.last_checkpoint), ConfigError);
}
