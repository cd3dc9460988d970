#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sketchvos/dataio/png_io.hpp"
#include "sketchvos/dataio/synthetic.hpp"
#include "sketchvos/metrics/metrics.hpp"

using namespace sketchvos;
using namespace sketchvos::metrics;
namespace fs = std::filesystem;

namespace {

Mask rect(int h, int w, int x0, int y0, int x1, int y1) {
  Mask m(h, w);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.at(y, x) = 1;
  return m;
}

Mask random_mask(int h, int w, std::mt19937_64& rng) {
  Mask m(h, w);
  const double density = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  std::bernoulli_distribution on(density);
  for (auto& v : m.data()) v = on(rng);
  return m;
}

double j_oracle(const Mask& a, const Mask& b) {
  int inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      inter += a.at(y, x) && b.at(y, x);
      uni += a.at(y, x) || b.at(y, x);
    }
  return uni ? static_cast<double>(inter) / uni : 1.0;
}

// Boundary points via a zero-padded copy: fg with any 4-neighbour 0.
std::vector<std::pair<int, int>> boundary_points(const Mask& m) {
  const int h = m.height(), w = m.width();
  std::vector<std::vector<int>> pad(h + 2, std::vector<int>(w + 2, 0));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) pad[y + 1][x + 1] = m.at(y, x);
  std::vector<std::pair<int, int>> pts;
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x)
      if (pad[y][x] && (pad[y - 1][x] * pad[y + 1][x] * pad[y][x - 1] * pad[y][x + 1] == 0)) pts.emplace_back(y - 1, x - 1);
  return pts;
}

// All-pairs matcher.
double f_oracle(const Mask& pred, const Mask& gt, double tol = 0.008) {
  const auto bp = boundary_points(pred), bg = boundary_points(gt);
  if (bp.empty() && bg.empty()) return 1.0;
  if (bp.empty() || bg.empty()) return 0.0;
  const double r = std::ceil(tol * std::sqrt(double(pred.height() * pred.height() + pred.width() * pred.width())));
  auto frac = [r](const auto& from, const auto& to) {
    int hit = 0;
    for (const auto& p : from) {
      double best = 1e30;
      for (const auto& q : to) best = std::min(best, std::hypot(p.first - q.first, p.second - q.second));
      hit += best <= r + 1e-12;
    }
    return static_cast<double>(hit) / from.size();
  };
  const double p = frac(bp, bg), rc = frac(bg, bp);
  return p + rc == 0 ? 0.0 : 2 * p * rc / (p + rc);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("sketchvos_metrics_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RegionJ, Examples) {
  const Mask a = rect(4, 4, 0, 0, 2, 2), b = rect(4, 4, 1, 1, 3, 3);
  EXPECT_DOUBLE_EQ(region_j(a, b), 4.0 / 14.0);
  EXPECT_DOUBLE_EQ(region_j(a, a), 1.0);
  EXPECT_DOUBLE_EQ(region_j(rect(4, 4, 0, 0, 1, 1), rect(4, 4, 2, 2, 3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(region_j(Mask(4, 4), Mask(4, 4)), 1.0);
  EXPECT_THROW(region_j(Mask(4, 4), Mask(4, 5)), ShapeError);
}

TEST(BoundaryF, Examples) {
  const Mask sq = rect(32, 32, 8, 8, 20, 20);
  EXPECT_DOUBLE_EQ(boundary_f(sq, sq), 1.0);
  EXPECT_DOUBLE_EQ(boundary_f(Mask(32, 32), sq), 0.0);
  EXPECT_DOUBLE_EQ(boundary_f(sq, Mask(32, 32)), 0.0);
  EXPECT_DOUBLE_EQ(boundary_f(Mask(32, 32), Mask(32, 32)), 1.0);
  const Mask shifted = rect(32, 32, 9, 8, 21, 20);
  EXPECT_NEAR(boundary_f(shifted, sq), f_oracle(shifted, sq), 1e-9);
  EXPECT_EQ(tolerance_radius(32, 32), 1);
  EXPECT_EQ(tolerance_radius(480, 854), 8);
  EXPECT_THROW(boundary_f(Mask(4, 4), Mask(5, 4)), ShapeError);
}

TEST(Metrics, RandomPairsMatchOracles) {
  std::mt19937_64 rng(123);
  std::vector<std::pair<Mask, Mask>> cases;
  for (int i = 0; i < 100; ++i) cases.emplace_back(random_mask(16, 16, rng), random_mask(16, 16, rng));
  Mask one(16, 16), other(16, 16);
  one.at(5, 5) = 1;
  other.at(5, 6) = 1;
  const Mask full(16, 16, 1), empty(16, 16);
  cases.emplace_back(empty, empty);
  cases.emplace_back(empty, full);
  cases.emplace_back(full, empty);
  cases.emplace_back(full, full);
  cases.emplace_back(one, one);
  cases.emplace_back(one, other);
  cases.emplace_back(one, empty);
  cases.emplace_back(one, full);
  cases.emplace_back(rect(16, 16, 0, 0, 15, 0), rect(16, 16, 0, 15, 15, 15));
  cases.emplace_back(rect(16, 16, 0, 0, 7, 15), rect(16, 16, 8, 0, 15, 15));
  for (const auto& [p, g] : cases) {
    EXPECT_EQ(region_j(p, g), j_oracle(p, g));
    EXPECT_NEAR(boundary_f(p, g), f_oracle(p, g), 1e-9);
  }
}

TEST(Metrics, SymmetryTranslationAndSelfMatch) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const Mask a = random_mask(16, 16, rng), b = random_mask(16, 16, rng);
    EXPECT_EQ(region_j(a, b), region_j(b, a));
    EXPECT_DOUBLE_EQ(boundary_f(a, b), boundary_f(b, a));
    if (count_foreground(a)) {
      EXPECT_DOUBLE_EQ(boundary_f(a, a), 1.0);
    }

    // Embed in a larger canvas and translate jointly.
    Mask a2(24, 24), b2(24, 24);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        a2.at(y + 3, x + 5) = a.at(y, x);
        b2.at(y + 3, x + 5) = b.at(y, x);
      }
    Mask a3(24, 24), b3(24, 24);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        a3.at(y + 7, x + 1) = a.at(y, x);
        b3.at(y + 7, x + 1) = b.at(y, x);
      }
    EXPECT_EQ(region_j(a2, b2), region_j(a3, b3));
  }
}

TEST(Metrics, GrowingPredictionNeverLowersJ) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask gt = random_mask(16, 16, rng);
    std::vector<int> order;
    for (int i = 0; i < 256; ++i)
      if (gt.data()[i]) order.push_back(i);
    std::shuffle(order.begin(), order.end(), rng);
    Mask pred(16, 16);
    double last = region_j(pred, gt);
    for (int i : order) {
      pred.data()[i] = 1;
      const double j = region_j(pred, gt);
      EXPECT_GE(j, last);
      last = j;
    }
    EXPECT_DOUBLE_EQ(last, 1.0);
  }
}

TEST(ScoreObject, SkipsReferenceFrame) {
  const Mask g = rect(8, 8, 2, 2, 5, 5);
  std::vector<Mask> gt{g, g, g}, pred{Mask(8, 8), g, rect(8, 8, 2, 2, 5, 3)};
  const ObjectScore s = score_object("s", 1, pred, gt);
  EXPECT_EQ(s.n_frames, 2);
  EXPECT_DOUBLE_EQ(s.j_mean, 0.5 * (1.0 + 0.5));
  EXPECT_DOUBLE_EQ(s.f_mean, 0.5 * (1.0 + f_oracle(pred[2], g)));
  const ObjectScore single = score_object("s", 1, {g}, {g});
  EXPECT_EQ(single.n_frames, 1);
  EXPECT_DOUBLE_EQ(single.j_mean, 1.0);
}

TEST(EvaluateDataset, PerfectEmptyAndMissing) {
  TempDir data, preds;
  dataio::SynthConfig cfg;
  cfg.n_sequences = 2;
  cfg.frames_per_seq = 5;
  dataio::gen_synthetic(cfg, 4, data.path());
  const auto index = dataio::load_dataset(data.path());
  for (const auto& e : index.sequences) {
    fs::create_directories(preds.path() / e.name);
    for (int t = 0; t < e.n_frames; ++t) fs::copy_file(e.annotation_path(t), preds.path() / e.name / dataio::frame_file_name(t));
  }
  EvalReport r = evaluate_dataset(preds.path(), data.path(), std::nullopt);
  EXPECT_EQ(r.objects.size(), 4u);
  EXPECT_DOUBLE_EQ(r.j_mean, 1.0);
  EXPECT_DOUBLE_EQ(r.f_mean, 1.0);
  EXPECT_DOUBLE_EQ(r.jf_mean, 1.0);

  for (const auto& e : index.sequences)
    for (int t = 0; t < e.n_frames; ++t)
      dataio::write_label_png(preds.path() / e.name / dataio::frame_file_name(t), LabelMap(64, 64));
  r = evaluate_dataset(preds.path(), data.path(), std::nullopt);
  EXPECT_DOUBLE_EQ(r.j_mean, 0.0);
  EXPECT_DOUBLE_EQ(r.f_mean, 0.0);

  fs::remove(preds.path() / "seq_0001" / "00003.png");
  try {
    evaluate_dataset(preds.path(), data.path(), std::nullopt);
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("seq_0001/00003.png"), std::string::npos) << e.what();
  }
}

TEST(EvaluateDataset, HandBuiltTwoSequenceAggregation) {
  TempDir data, preds, out;
  nlohmann::json meta;
  const Mask g = rect(8, 8, 1, 1, 4, 4);  // 16 px
  // seq a: frame 1 prediction = g, frame 2 = left half (J 0.5) -> mean 0.75
  // seq b: frame 1 prediction empty, frame 2 = g -> mean 0.5
  const std::vector<std::vector<Mask>> pred_masks{{g, g, rect(8, 8, 1, 1, 2, 4)}, {g, Mask(8, 8), g}};
  const char* names[] = {"a", "b"};
  for (int s = 0; s < 2; ++s) {
    fs::create_directories(data.path() / "JPEGImages" / names[s]);
    fs::create_directories(data.path() / "Annotations" / names[s]);
    fs::create_directories(preds.path() / names[s]);
    for (int t = 0; t < 3; ++t) {
      dataio::write_rgb_png(data.path() / "JPEGImages" / names[s] / dataio::frame_file_name(t), RgbImage(8, 8));
      dataio::write_label_png(data.path() / "Annotations" / names[s] / dataio::frame_file_name(t), g);
      dataio::write_label_png(preds.path() / names[s] / dataio::frame_file_name(t), pred_masks[s][t]);
    }
    meta["sequences"][names[s]] = {{"n_frames", 3}, {"objects", {{"1", {{"absent_frames", nlohmann::json::array()}}}}}};
  }
  std::ofstream(data.path() / "meta.json") << meta.dump();
  const EvalReport r = evaluate_dataset(preds.path(), data.path(), std::nullopt);
  ASSERT_EQ(r.objects.size(), 2u);
  EXPECT_DOUBLE_EQ(r.objects[0].j_mean, 0.75);
  EXPECT_DOUBLE_EQ(r.objects[1].j_mean, 0.5);
  EXPECT_DOUBLE_EQ(r.j_mean, 0.625);
  const double fa = 0.5 * (1.0 + f_oracle(pred_masks[0][2], g));
  const double fb = 0.5 * (0.0 + 1.0);
  EXPECT_NEAR(r.f_mean, 0.5 * (fa + fb), 1e-12);
  EXPECT_NEAR(r.jf_mean, 0.5 * (0.625 + 0.5 * (fa + fb)), 1e-12);

  write_report_csv(r, out.path());
  const std::string global = slurp(out.path() / "global.csv");
  EXPECT_EQ(global.substr(0, global.find('\n')), "J-Mean,F-Mean,J&F-Mean");
  const std::string per = slurp(out.path() / "per_sequence.csv");
  EXPECT_EQ(per.substr(0, per.find('\n')), "seq,obj,J-Mean,F-Mean");
  EXPECT_NE(per.find("a,1,0.750000,"), std::string::npos);
  EXPECT_NE(per.find("b,1,0.500000,0.500000"), std::string::npos);
}
