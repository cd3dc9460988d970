#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sketchvos/dataio/sampling.hpp"
#include "sketchvos/model/model.hpp"

namespace sketchvos::train {

namespace fs = std::filesystem;
using numerics::Var;

inline constexpr double kPaperLearningRate = 1e-5;
inline constexpr double kToyLearningRate = 1e-4;

/// "paper" or "toy".
double lr_preset(std::string_view name);

struct TrainConfig {
  model::ModelConfig model;
  double lr = kToyLearningRate;
  int steps = 1000;
  int batch_size = 4;
  std::uint64_t seed = 0;
  int eval_every = 500;  // 0: validate only before and after training
  int log_every = 50;
  int sample_window = dataio::kDefaultSampleWindow;
  double flip_prob = 0.5;
  fs::path data;
  fs::path out_dir;

  void validate() const;
};

/// Mean BCE over the supervised frames of a {0, i, j} trace: frame 0 only when
/// the design predicts it from the reference.
template <typename T>
Var<T> supervised_loss(const std::vector<Var<T>>& probs, const std::array<Mask, 3>& masks, bool first_supervised);

/// Forward pass of one clip: bootstrap on frame 0, propagate to i and j with
/// i entering memory. Returns the supervised loss.
template <typename T>
Var<T> clip_loss(const model::Model<T>& m, const dataio::TrainingClip& clip);

/// Accumulates gradients over the batch (loss / batch size per clip), takes one
/// Adam step and clears gradients. Returns the mean loss. A non-finite loss
/// raises DivergenceError before any update.
double train_step(model::Model<float>& m, const std::vector<dataio::TrainingClip>& batch,
                  const numerics::AdamConfig& adam);

/// Training split held in memory with one resolved reference per object.
class ClipSource {
 public:
  ClipSource(const dataio::DatasetIndex& index, refgen::ReferenceKind kind, int window);

  /// Uniform over (sequence, object), then uniform clip; joint horizontal flip
  /// with probability flip_prob.
  dataio::TrainingClip sample(std::mt19937_64& rng, double flip_prob) const;
  std::size_t objects() const { return pairs_.size(); }

 private:
  struct Pair {
    std::size_t sequence;
    int object_id;
    Mask reference;
  };
  std::vector<dataio::LoadedSequence> sequences_;
  std::vector<Pair> pairs_;
  int window_;
};

/// Running loss: mean of the last 100 step losses. Initial loss: mean of the first 20.
double running_loss(const std::vector<double>& losses);
double initial_loss(const std::vector<double>& losses);

struct FitResult {
  int steps_run = 0;  // optimizer steps taken in this call
  std::vector<double> losses;  // every step since the start of training
  std::optional<double> initial_val_jf;
  std::optional<double> best_val_jf;
  std::optional<double> final_val_jf;
  fs::path last_checkpoint;
  fs::path best_checkpoint;  // empty without a validation split
};

/// Trains for config.steps total optimizer steps, resuming from `resume` when
/// given. Writes <out>/train.log (one JSON record per line), last.ckpt, and
/// best.ckpt (highest validation J&F) when the dataset has a val split.
FitResult fit(const TrainConfig& config, const std::optional<fs::path>& resume = std::nullopt,
              const std::function<void(const std::string&)>& on_log = {});

/// Validation J&F of `m` on the dataset's val split; predictions go under `scratch`.
double validate(const model::Model<float>& m, const dataio::DatasetIndex& val, const fs::path& scratch);

}  // namespace sketchvos::train
