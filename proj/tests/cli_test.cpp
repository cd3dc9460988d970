#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "sketchvos/cli/run_config.hpp"
#include "sketchvos/cli/visualize.hpp"
#include "sketchvos/dataio/png_io.hpp"
#include "sketchvos/dataio/synthetic.hpp"

using namespace sketchvos;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string("'") + SKETCHVOS_CLI + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, ReferenceConfigRoundTrips) {
  const auto ref = cli::reference_config();
  EXPECT_EQ(cli::to_json(cli::run_config_from_json(ref)), ref);
}

TEST(RunConfig, MissingKeysKeepDefaults) {
  const auto c = cli::run_config_from_json({{"train", {{"steps", 7}}}});
  EXPECT_EQ(c.train.steps, 7);
  EXPECT_EQ(c.train.batch_size, train::TrainConfig{}.batch_size);
  EXPECT_EQ(c.train.model.fusion.design, model::Design::cross_q);
  EXPECT_EQ(c.eval_split, dataio::Split::val);
}

TEST(RunConfig, LearningRatePresets) {
  EXPECT_DOUBLE_EQ(cli::run_config_from_json({{"train", {{"lr", "paper"}}}}).train.lr, 1e-5);
  EXPECT_DOUBLE_EQ(cli::run_config_from_json({{"train", {{"lr", 3e-4}}}}).train.lr, 3e-4);
  EXPECT_THROW(cli::run_config_from_json({{"train", {{"lr", "warp"}}}}), ConfigError);
}

TEST(RunConfig, UnknownKeysAreNamed) {
  try {
    cli::run_config_from_json({{"train", {{"stpes", 10}}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stpes"), std::string::npos);
  }
  EXPECT_THROW(cli::run_config_from_json({{"optimizer", cli::json::object()}}), ConfigError);
  EXPECT_THROW(cli::run_config_from_json({{"eval", {{"split", "test"}}}}), ConfigError);
}

TEST(RunConfig, MissingFileIsNotFound) {
  EXPECT_THROW(cli::load_run_config("/nonexistent/run.json"), NotFoundError);
}

TEST(Overlay, BlendsInteriorAndPaintsContour) {
  RgbImage frame(5, 5);
  for (auto& v : frame.data()) v = 100;
  LabelMap labels(5, 5);
  for (int y = 1; y <= 3; ++y)
    for (int x = 1; x <= 3; ++x) labels.at(y, x) = 1;
  const auto out = cli::render_overlay(frame, labels);
  const auto& colour = dataio::davis_palette()[1];
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(out.px(0, 0)[c], 100);
    EXPECT_EQ(out.px(1, 1)[c], colour[c]);
    EXPECT_EQ(out.px(2, 2)[c], (6 * 100 + 4 * colour[c] + 5) / 10);
  }
  EXPECT_THROW(cli::render_overlay(frame, LabelMap(4, 5)), ShapeError);
}

TEST(Visualize, WritesOneOverlayPerPrediction) {
  TempDir dir("sketchvos_cli_vis");
  dataio::SynthConfig cfg;
  cfg.n_sequences = 2;
  cfg.frames_per_seq = 4;
  cfg.height = cfg.width = 32;
  dataio::gen_synthetic(cfg, 2, dir.path / "data");
  const auto index = dataio::load_dataset(dir.path / "data");
  for (const auto& e : index.sequences) {
    fs::create_directories(dir.path / "pred" / e.name);
    for (int t = 0; t < e.n_frames; ++t) fs::copy_file(e.annotation_path(t), dir.path / "pred" / e.name / dataio::frame_file_name(t));
  }
  EXPECT_EQ(cli::visualize(dir.path / "pred", dir.path / "data", dir.path / "vis", refgen::ReferenceKind::sketch), 8);
  const auto img = dataio::read_rgb_png(dir.path / "vis" / index.sequences[0].name / dataio::frame_file_name(0));
  EXPECT_EQ(img.height(), 32);
  EXPECT_THROW(cli::visualize(dir.path / "missing", dir.path / "data", dir.path / "vis", refgen::ReferenceKind::sketch),
               NotFoundError);
}

TEST(Executable, ExitCodes) {
  TempDir dir("sketchvos_cli_exit");
  EXPECT_EQ(run("config --out '" + (dir.path / "run.json").string() + "'"), 0);
  EXPECT_TRUE(fs::exists(dir.path / "run.json"));
  EXPECT_EQ(run("check --suite memory"), 0);
  EXPECT_EQ(run("check --suite nonsense"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("eval --checkpoint /nonexistent.ckpt --data /nonexistent --out '" + dir.path.string() + "'"), 2);
  EXPECT_EQ(run("train --config /nonexistent.json"), 2);
  std::ofstream(dir.path / "bad.json") << R"({"train": {"stpes": 3}})";
  EXPECT_EQ(run("train --config '" + (dir.path / "bad.json").string() + "'"), 2);
}

TEST(Executable, GenerateTrainEvaluate) {
  TempDir dir("sketchvos_cli_e2e");
  const std::string d = "'" + (dir.path / "data").string() + "'";
  ASSERT_EQ(run("gen-synth --out " + d + " --seqs 2 --val-seqs 1 --frames 5 --size 32 --seed 4"), 0);
  ASSERT_EQ(run("gen-refs --data " + d + " --kinds cross,box"), 0);
  EXPECT_TRUE(fs::exists(dir.path / "data" / "References" / "gen_refs.json"));
  std::ofstream(dir.path / "tiny.json") << R"({"encoder": {"widths": [4, 4, 8, 8], "key_dim": 4, "value_dim": 8},
                                               "fusion": {"channels": 8}, "train": {"batch_size": 1}})";
  const std::string out = "'" + (dir.path / "run").string() + "'";
  ASSERT_EQ(run("train --config '" + (dir.path / "tiny.json").string() + "' --data " + d + " --out " + out +
                " --steps 2 --reference-kind cross"),
            0);
  EXPECT_TRUE(fs::exists(dir.path / "run" / "run_config.json"));
  const std::string ev = "'" + (dir.path / "eval").string() + "'";
  ASSERT_EQ(run("eval --checkpoint '" + (dir.path / "run" / "last.ckpt").string() + "' --data " + d + " --out " + ev),
            0);
  EXPECT_TRUE(fs::exists(dir.path / "eval" / "global.csv"));
  EXPECT_TRUE(fs::exists(dir.path / "eval" / "per_sequence.csv"));
  EXPECT_EQ(run("eval --checkpoint '" + (dir.path / "run" / "last.ckpt").string() + "' --data " + d + " --out " + ev +
                " --reference-kind mask"),
            2);
  EXPECT_EQ(run("visualize --predictions '" + (dir.path / "eval" / "Predictions").string() + "' --data " + d +
                " --out '" + (dir.path / "vis").string() + "'"),
            0);
}
