#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sketchvos/checks/checks.hpp"
#include "sketchvos/cli/run_config.hpp"
#include "sketchvos/cli/visualize.hpp"
#include "sketchvos/dataio/synthetic.hpp"
#include "sketchvos/metrics/metrics.hpp"
#include "sketchvos/model/checkpoint.hpp"
#include "sketchvos/model/propagate.hpp"
#include "sketchvos/parallel.hpp"

using namespace sketchvos;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void echo(const fs::path& dir, const std::string& name, const json& config) {
  fs::create_directories(dir);
  std::ofstream(dir / name) << config.dump(2) << '\n';
}

std::vector<refgen::ReferenceKind> parse_kinds(const std::string& list) {
  std::vector<refgen::ReferenceKind> kinds;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) kinds.push_back(refgen::parse_reference_kind(item));
  }
  if (kinds.empty()) throw ConfigError("--kinds must name at least one reference kind");
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-referenced video object segmentation lab"};
  app.require_subcommand(1);

  // gen-synth
  dataio::SynthConfig synth;
  std::string synth_out, motion = "linear";
  std::uint64_t synth_seed = 0;
  int size = 64;
  auto* gen_synth = app.add_subcommand("gen-synth", "Generate a synthetic moving-shapes dataset with sketches");
  gen_synth->add_option("--out", synth_out, "Output dataset root")->required();
  gen_synth->add_option("--seqs", synth.n_sequences, "Training sequences")->capture_default_str();
  gen_synth->add_option("--val-seqs", synth.n_val_sequences, "Validation sequences")->capture_default_str();
  gen_synth->add_option("--frames", synth.frames_per_seq, "Frames per sequence")->capture_default_str();
  gen_synth->add_option("--size", size, "Frame height and width")->capture_default_str();
  gen_synth->add_option("--objects", synth.n_objects, "Objects per sequence, 1-4")->capture_default_str();
  gen_synth->add_flag("--distractors", synth.distractor_mode, "Make object 2 a visual copy of object 1");
  gen_synth->add_option("--motion", motion, "linear or sinusoidal")->capture_default_str();
  gen_synth->add_flag("--occlusion", synth.occlusion, "Let objects cross and occlude each other");
  gen_synth->add_option("--jitter", synth.sketch_jitter, "Sketch vertex jitter in pixels")->capture_default_str();
  gen_synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();

  // gen-refs
  std::string refs_data, refs_kinds = "click,cross,circle,box,contour,scribble";
  std::uint64_t refs_seed = 0;
  auto* gen_refs = app.add_subcommand("gen-refs", "Write interactive reference rasters for every object");
  gen_refs->add_option("--data", refs_data, "Dataset root")->required();
  gen_refs->add_option("--kinds", refs_kinds, "Comma-separated reference kinds")->capture_default_str();
  gen_refs->add_option("--seed", refs_seed, "Recorded for provenance; generation is deterministic");

  // train
  std::string train_config, resume, train_data, train_out, train_design, train_kind, train_lr;
  std::optional<int> train_steps;
  std::optional<std::uint64_t> train_seed;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a run config");
  train_cmd->add_option("--config", train_config, "Run config (JSON)");
  train_cmd->add_option("--resume", resume, "Checkpoint to resume from");
  train_cmd->add_option("--data", train_data, "Override data.root");
  train_cmd->add_option("--out", train_out, "Override train.out");
  train_cmd->add_option("--steps", train_steps, "Override train.steps");
  train_cmd->add_option("--seed", train_seed, "Override train.seed");
  train_cmd->add_option("--design", train_design, "Override fusion.design");
  train_cmd->add_option("--reference-kind", train_kind, "Override train.reference_kind");
  train_cmd->add_option("--lr", train_lr, "Override train.lr (number, paper or toy)");

  // eval
  std::string eval_ckpt, eval_data, eval_kind, eval_out, eval_split = "val";
  auto* eval_cmd = app.add_subcommand("eval", "Propagate every object and score J/F");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Model checkpoint")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset root")->required();
  eval_cmd->add_option("--reference-kind", eval_kind, "Reference kind (default: the model's)");
  eval_cmd->add_option("--out", eval_out, "Output directory")->required();
  eval_cmd->add_option("--split", eval_split, "train, val or all")->capture_default_str();

  // visualize
  std::string vis_pred, vis_data, vis_out, vis_kind = "sketch";
  auto* vis_cmd = app.add_subcommand("visualize", "Render prediction overlays");
  vis_cmd->add_option("--predictions", vis_pred, "Predictions directory (<eval out>/Predictions)")->required();
  vis_cmd->add_option("--data", vis_data, "Dataset root")->required();
  vis_cmd->add_option("--out", vis_out, "Output directory")->required();
  vis_cmd->add_option("--reference-kind", vis_kind, "Reference shown in the first-frame inset")->capture_default_str();

  // check
  std::string suite = "all";
  auto* check_cmd = app.add_subcommand("check", "Run the built-in verification suites");
  check_cmd->add_option("--suite", suite, "grads, metrics, attention, memory or all")->capture_default_str();

  // config
  std::string config_out;
  auto* config_cmd = app.add_subcommand("config", "Write the reference run config with every default");
  config_cmd->add_option("--out", config_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    worker_count();  // validates SKETCHVOS_THREADS early

    if (*gen_synth) {
      synth.height = synth.width = size;
      synth.motion = dataio::parse_motion(motion);
      dataio::gen_synthetic(synth, synth_seed, synth_out);
      std::cout << "wrote " << synth.n_sequences + synth.n_val_sequences << " sequences to " << synth_out << "\n";
      return 0;
    }

    if (*gen_refs) {
      const auto kinds = parse_kinds(refs_kinds);
      const int n = dataio::gen_refs(refs_data, kinds);
      json names = json::array();
      for (auto k : kinds) names.push_back(refgen::to_string(k));
      echo(fs::path(refs_data) / "References", "gen_refs.json", {{"kinds", names}, {"seed", refs_seed}});
      std::cout << "wrote " << n << " reference rasters\n";
      return 0;
    }

    if (*train_cmd) {
      cli::RunConfig rc = train_config.empty() ? cli::RunConfig{} : cli::load_run_config(train_config);
      train::TrainConfig& tc = rc.train;
      if (!train_data.empty()) tc.data = train_data;
      if (!train_out.empty()) tc.out_dir = train_out;
      if (train_steps) tc.steps = *train_steps;
      if (train_seed) tc.seed = *train_seed;
      if (!train_design.empty()) {
        tc.model.fusion.design = model::parse_design(train_design);
        if (tc.model.fusion.design == model::Design::convweight) tc.model.fusion.sketch_level = model::SketchLevel::gap;
      }
      if (!train_kind.empty()) tc.model.reference_kind = refgen::parse_reference_kind(train_kind);
      if (!train_lr.empty()) {
        tc.lr = (train_lr == "paper" || train_lr == "toy") ? train::lr_preset(train_lr) : std::stod(train_lr);
      }
      if (tc.data.empty()) throw ConfigError("no dataset: set data.root or pass --data");
      if (tc.out_dir.empty()) throw ConfigError("no output directory: set train.out or pass --out");
      tc.validate();
      echo(tc.out_dir, "run_config.json", cli::to_json(rc));
      const auto result = train::fit(tc, resume.empty() ? std::nullopt : std::optional<fs::path>(resume),
                                     [](const std::string& line) { std::cout << line << std::endl; });
      std::cout << "initial loss " << train::initial_loss(result.losses) << ", running loss "
                << train::running_loss(result.losses) << "\n";
      if (result.best_val_jf) std::cout << "best val J&F " << *result.best_val_jf << "\n";
      return 0;
    }

    if (*eval_cmd) {
      model::Model<float> m = model::load_model(eval_ckpt);
      if (!eval_kind.empty()) {
        m.config.reference_kind = refgen::parse_reference_kind(eval_kind);
        model::check_reference_compatible(m.config.reference_kind, m.config.fusion.design);
      }
      const std::optional<dataio::Split> split =
          eval_split == "all" ? std::nullopt : std::optional(dataio::parse_split(eval_split));
      const auto index = dataio::load_dataset(eval_data, split);
      const fs::path out(eval_out), preds = out / "Predictions";
      fs::remove_all(preds);
      echo(out, "eval_config.json",
           {{"checkpoint", eval_ckpt}, {"data", eval_data}, {"split", eval_split},
            {"reference_kind", refgen::to_string(m.config.reference_kind)}, {"model", model::to_json(m.config)}});
      model::predict_dataset(m, index, preds);
      const auto report = metrics::evaluate_dataset(preds, eval_data, split);
      metrics::write_report_csv(report, out);
      std::cout << "J " << report.j_mean << "  F " << report.f_mean << "  J&F " << report.jf_mean << "\n";
      return 0;
    }

    if (*vis_cmd) {
      const int n = cli::visualize(vis_pred, vis_data, vis_out, refgen::parse_reference_kind(vis_kind));
      echo(vis_out, "visualize_config.json",
           {{"predictions", vis_pred}, {"data", vis_data}, {"reference_kind", vis_kind}});
      std::cout << "wrote " << n << " overlays\n";
      return 0;
    }

    if (*check_cmd) {
      const auto results = checks::run_suite(suite);
      int failed = 0;
      for (const auto& r : results) {
        std::cout << checks::format(r) << std::endl;
        failed += !r.passed;
      }
      std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
      return failed ? kExitFailure : 0;
    }

    if (*config_cmd) {
      const std::string text = cli::reference_config().dump(2) + "\n";
      if (config_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(config_out) << text;
      }
      return 0;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
