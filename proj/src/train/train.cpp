#include "sketchvos/train/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "sketchvos/metrics/metrics.hpp"
#include "sketchvos/model/checkpoint.hpp"
#include "sketchvos/model/propagate.hpp"

namespace sketchvos::train {

using json = nlohmann::json;
using model::Model;
using numerics::Tensor;
using numerics::Var;

double lr_preset(std::string_view name) {
  if (name == "paper") return kPaperLearningRate;
  if (name == "toy") return kToyLearningRate;
  throw ConfigError("unknown lr preset '" + std::string(name) + "' (expected paper or toy)");
}

void TrainConfig::validate() const {
  model.validate();
  if (!(lr > 0)) throw ConfigError("lr must be > 0");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (sample_window < 1) throw ConfigError("sample_window must be >= 1");
  if (flip_prob < 0 || flip_prob > 1) throw ConfigError("flip_prob must be in [0, 1]");
}

template <typename T>
Var<T> supervised_loss(const std::vector<Var<T>>& probs, const std::array<Mask, 3>& masks, bool first_supervised) {
  if (probs.size() != masks.size()) throw ShapeError("supervised_loss: expected 3 predictions");
  std::vector<Var<T>> terms;
  for (std::size_t k = first_supervised ? 0 : 1; k < probs.size(); ++k) {
    const Mask& m = masks[k];
    terms.push_back(numerics::bce_loss(probs[k], model::mask_tensor<T>(m).reshaped({m.height(), m.width()})));
  }
  Var<T> total = terms.front();
  for (std::size_t k = 1; k < terms.size(); ++k) total = numerics::add(total, terms[k]);
  return numerics::scale(total, T(1) / static_cast<T>(terms.size()));
}

template <typename T>
Var<T> clip_loss(const Model<T>& m, const dataio::TrainingClip& clip) {
  const auto trace = m.run([&](int k) { return Var<T>(model::image_tensor<T>(clip.frames[k])); }, 3,
                           Var<T>(model::mask_tensor<T>(clip.reference)), [](int k) { return k < 2; });
  return supervised_loss(trace.probs, clip.masks, trace.first_supervised);
}

double train_step(Model<float>& m, const std::vector<dataio::TrainingClip>& batch, const numerics::AdamConfig& adam) {
  if (batch.empty()) throw ConfigError("train_step: empty batch");
  const auto params = m.parameters();
  const float weight = 1.0f / static_cast<float>(batch.size());
  double total = 0;
  for (const auto& clip : batch) {
    const Var<float> loss = clip_loss(m, clip);
    const double v = loss.value()[0];
    if (!std::isfinite(v)) {
      for (const auto& p : params) p.param->zero_grad();
      throw DivergenceError("non-finite loss " + std::to_string(v) + " on " + clip.sequence + " object " +
                            std::to_string(clip.object_id) + " frames {0, " + std::to_string(clip.indices[1]) +
                            ", " + std::to_string(clip.indices[2]) + "}");
    }
    numerics::scale(loss, weight).backward();
    total += v;
  }
  numerics::adam_step(params, adam);
  for (const auto& p : params) p.param->zero_grad();
  return total / static_cast<double>(batch.size());
}

ClipSource::ClipSource(const dataio::DatasetIndex& index, refgen::ReferenceKind kind, int window) : window_(window) {
  for (const auto& entry : index.sequences) {
    sequences_.push_back(dataio::load_sequence(entry));
    const auto& seq = sequences_.back();
    if (seq.video.length() < 3) continue;
    for (int id : entry.object_ids) {
      pairs_.push_back({sequences_.size() - 1, id, dataio::resolve_reference(entry, seq, id, kind).raster});
    }
  }
  if (pairs_.empty()) throw SamplingError("no trainable (sequence, object) pairs in " + index.root.string());
}

dataio::TrainingClip ClipSource::sample(std::mt19937_64& rng, double flip_prob) const {
  std::uniform_int_distribution<std::size_t> pick(0, pairs_.size() - 1);
  const Pair& p = pairs_[pick(rng)];
  dataio::TrainingClip clip = dataio::sample_clip(sequences_[p.sequence], p.object_id, p.reference, rng, window_);
  if (std::uniform_real_distribution<double>(0, 1)(rng) < flip_prob) {
    for (auto& f : clip.frames) f = flip_horizontal(f);
    for (auto& m : clip.masks) m = flip_horizontal(m);
    clip.reference = flip_horizontal(clip.reference);
  }
  return clip;
}

double running_loss(const std::vector<double>& losses) {
  if (losses.empty()) return 0;
  const std::size_t n = std::min<std::size_t>(100, losses.size());
  return std::accumulate(losses.end() - static_cast<std::ptrdiff_t>(n), losses.end(), 0.0) / static_cast<double>(n);
}

double initial_loss(const std::vector<double>& losses) {
  if (losses.empty()) return 0;
  const std::size_t n = std::min<std::size_t>(20, losses.size());
  return std::accumulate(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(n), 0.0) /
         static_cast<double>(n);
}

double validate(const Model<float>& m, const dataio::DatasetIndex& val, const fs::path& scratch) {
  fs::remove_all(scratch);
  model::predict_dataset(m, val, scratch);
  return metrics::evaluate_dataset(scratch, val.root, val.split).jf_mean;
}

namespace {

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

json config_echo(const TrainConfig& c) {
  return {{"model", model::to_json(c.model)}, {"lr", c.lr}, {"steps", c.steps}, {"batch_size", c.batch_size},
          {"seed", c.seed}, {"eval_every", c.eval_every}, {"log_every", c.log_every},
          {"sample_window", c.sample_window}, {"flip_prob", c.flip_prob}, {"data", c.data.string()},
          {"out_dir", c.out_dir.string()}};
}

}  // namespace

FitResult fit(const TrainConfig& config, const std::optional<fs::path>& resume,
              const std::function<void(const std::string&)>& on_log) {
  config.validate();
  const dataio::DatasetIndex train_index = dataio::load_dataset(config.data, dataio::Split::train);
  const dataio::DatasetIndex val_index = dataio::load_dataset(config.data, dataio::Split::val);
  bool has_val = !val_index.sequences.empty();
  for (const auto& s : val_index.sequences) {
    for (const auto& t : train_index.sequences) has_val = has_val && s.name != t.name;  // no split table
  }
  const ClipSource source(train_index, config.model.reference_kind, config.sample_window);

  fs::create_directories(config.out_dir);
  std::ofstream(config.out_dir / "config.json") << config_echo(config).dump(2) << '\n';

  // Settings that shape the optimisation trajectory; steps, logging and paths may change on resume.
  const json trajectory{{"lr", config.lr},
                        {"batch_size", config.batch_size},
                        {"seed", config.seed},
                        {"sample_window", config.sample_window},
                        {"flip_prob", config.flip_prob}};

  FitResult result;
  Model<float> m;
  std::mt19937_64 rng(config.seed);
  int start = 0;
  if (resume) {
    json state;
    m = model::load_model(*resume, &state);
    if (model::to_json(m.config) != model::to_json(config.model)) {
      throw ConfigError("checkpoint " + resume->string() + " was trained with a different model config");
    }
    if (state.contains("trajectory") && state["trajectory"] != trajectory) {
      throw ConfigError("checkpoint " + resume->string() + " was trained with different settings " +
                        state["trajectory"].dump() + " (requested " + trajectory.dump() + ")");
    }
    start = state.at("step").get<int>();
    std::istringstream(state.at("rng").get<std::string>()) >> rng;
    result.losses = state.at("losses").get<std::vector<double>>();
    if (state.contains("initial_val_jf")) result.initial_val_jf = state["initial_val_jf"].get<double>();
    if (state.contains("best_val_jf")) result.best_val_jf = state["best_val_jf"].get<double>();
  } else {
    m = Model<float>(config.model, config.seed);
  }
  const auto params = m.parameters();
  const numerics::AdamConfig adam{config.lr};

  std::ofstream log(config.out_dir / "train.log", resume ? std::ios::app : std::ios::trunc);
  auto emit = [&](const json& record) {
    log << record.dump() << '\n';
    log.flush();
    if (on_log) on_log(record.dump());
  };
  auto state = [&](int step) {
    json s{{"step", step}, {"rng", rng_state(rng)}, {"losses", result.losses}, {"trajectory", trajectory}};
    if (result.initial_val_jf) s["initial_val_jf"] = *result.initial_val_jf;
    if (result.best_val_jf) s["best_val_jf"] = *result.best_val_jf;
    return s;
  };
  const fs::path scratch = config.out_dir / "val_predictions";
  result.last_checkpoint = config.out_dir / "last.ckpt";
  if (has_val) result.best_checkpoint = config.out_dir / "best.ckpt";

  auto run_validation = [&](int step) {
    const auto t0 = std::chrono::steady_clock::now();
    const double jf = validate(m, val_index, scratch);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.final_val_jf = jf;
    if (!result.initial_val_jf) result.initial_val_jf = jf;
    const bool best = !result.best_val_jf || jf > *result.best_val_jf;
    if (best) result.best_val_jf = jf;
    emit({{"step", step}, {"val_jf", jf}, {"best", best}, {"seconds", secs}});
    if (best) model::save_checkpoint(result.best_checkpoint, m.config, params, state(step));
  };

  if (has_val && !resume) run_validation(0);
  const auto t_start = std::chrono::steady_clock::now();
  for (int step = start + 1; step <= config.steps; ++step) {
    std::vector<dataio::TrainingClip> batch;
    for (int b = 0; b < config.batch_size; ++b) batch.push_back(source.sample(rng, config.flip_prob));
    double loss;
    try {
      loss = train_step(m, batch, adam);
    } catch (const DivergenceError& e) {
      emit({{"step", step}, {"error", e.what()}});
      throw;
    }
    result.losses.push_back(loss);
    ++result.steps_run;
    if (step % config.log_every == 0 || step == config.steps) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      emit({{"step", step}, {"loss", loss}, {"running_loss", running_loss(result.losses)}, {"seconds", secs}});
    }
    if (has_val && ((config.eval_every > 0 && step % config.eval_every == 0) || step == config.steps)) {
      run_validation(step);
    }
  }
  model::save_checkpoint(result.last_checkpoint, m.config, params, state(std::max(start, config.steps)));
  return result;
}

template Var<float> supervised_loss(const std::vector<Var<float>>&, const std::array<Mask, 3>&, bool);
template Var<double> supervised_loss(const std::vector<Var<double>>&, const std::array<Mask, 3>&, bool);
template Var<float> clip_loss(const Model<float>&, const dataio::TrainingClip&);
template Var<double> clip_loss(const Model<double>&, const dataio::TrainingClip&);

}  // namespace sketchvos::train
