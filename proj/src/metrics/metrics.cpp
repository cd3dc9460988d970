#include "sketchvos/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sketchvos/dataio/png_io.hpp"

namespace sketchvos::metrics {
namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offs;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dy, dx);
    }
  }
  return offs;
}

// Fraction of `from` boundary pixels within the disk of some `to` pixel.
double matched_fraction(const Mask& from, const Mask& to, const std::vector<std::pair<int, int>>& offs,
                        std::size_t n_from) {
  std::size_t hit = 0;
  for (int y = 0; y < from.height(); ++y) {
    for (int x = 0; x < from.width(); ++x) {
      if (!from.at(y, x)) continue;
      for (const auto& [dy, dx] : offs) {
        if (to.get_or(y + dy, x + dx, 0)) {
          ++hit;
          break;
        }
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(n_from);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double region_j(const Mask& pred, const Mask& gt) {
  require_same_size(pred, gt, "region_j");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.data()[i] != 0, g = gt.data()[i] != 0;
    inter += p && g;
    uni += p || g;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Mask boundary_map(const Mask& m) {
  Mask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(y, x)) continue;
      if (!m.get_or(y - 1, x, 0) || !m.get_or(y + 1, x, 0) || !m.get_or(y, x - 1, 0) || !m.get_or(y, x + 1, 0)) {
        out.at(y, x) = 1;
      }
    }
  }
  return out;
}

int tolerance_radius(int height, int width, double tol_fraction) {
  return static_cast<int>(std::ceil(tol_fraction * std::hypot(static_cast<double>(height), static_cast<double>(width))));
}

double boundary_f(const Mask& pred, const Mask& gt, double tol_fraction) {
  require_same_size(pred, gt, "boundary_f");
  const Mask bp = boundary_map(pred), bg = boundary_map(gt);
  const std::size_t np = count_foreground(bp), ng = count_foreground(bg);
  if (np == 0 && ng == 0) return 1.0;
  if (np == 0 || ng == 0) return 0.0;
  const auto offs = disk_offsets(tolerance_radius(pred.height(), pred.width(), tol_fraction));
  const double precision = matched_fraction(bp, bg, offs, np);
  const double recall = matched_fraction(bg, bp, offs, ng);
  if (precision + recall == 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

ObjectScore score_object(const std::string& sequence, int object_id, const std::vector<Mask>& pred,
                         const std::vector<Mask>& gt) {
  if (pred.size() != gt.size() || gt.empty()) {
    throw ShapeError("score_object: " + std::to_string(pred.size()) + " predictions for " + std::to_string(gt.size()) +
                     " ground-truth frames");
  }
  ObjectScore s{sequence, object_id, 0, 0, 0};
  const std::size_t first = gt.size() == 1 ? 0 : 1;
  for (std::size_t t = first; t < gt.size(); ++t) {
    s.j_mean += region_j(pred[t], gt[t]);
    s.f_mean += boundary_f(pred[t], gt[t]);
    ++s.n_frames;
  }
  s.j_mean /= s.n_frames;
  s.f_mean /= s.n_frames;
  return s;
}

EvalReport aggregate(std::vector<ObjectScore> scores) {
  EvalReport r;
  r.objects = std::move(scores);
  for (const auto& s : r.objects) {
    r.j_mean += s.j_mean;
    r.f_mean += s.f_mean;
  }
  if (!r.objects.empty()) {
    r.j_mean /= static_cast<double>(r.objects.size());
    r.f_mean /= static_cast<double>(r.objects.size());
  }
  r.jf_mean = 0.5 * (r.j_mean + r.f_mean);
  return r;
}

EvalReport evaluate_dataset(const std::filesystem::path& pred_root, const std::filesystem::path& gt_root,
                            std::optional<dataio::Split> split) {
  const dataio::DatasetIndex index = dataio::load_dataset(gt_root, split);
  std::vector<std::string> missing;
  for (const auto& e : index.sequences) {
    for (int t = 0; t < e.n_frames; ++t) {
      const auto p = pred_root / e.name / dataio::frame_file_name(t);
      if (!std::filesystem::is_regular_file(p)) missing.push_back(p.string());
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing prediction frames:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " (+" + std::to_string(missing.size() - 20) + " more)";
    throw IntegrityError(msg);
  }
  std::vector<ObjectScore> scores;
  for (const auto& e : index.sequences) {
    std::vector<LabelMap> preds, gts;
    for (int t = 0; t < e.n_frames; ++t) {
      preds.push_back(dataio::read_label_png(pred_root / e.name / dataio::frame_file_name(t)));
      gts.push_back(dataio::read_label_png(e.annotation_path(t)));
    }
    for (int id : e.object_ids) {
      std::vector<Mask> p, g;
      for (int t = 0; t < e.n_frames; ++t) {
        p.push_back(mask_for_label(preds[t], id));
        g.push_back(mask_for_label(gts[t], id));
      }
      scores.push_back(score_object(e.name, id, p, g));
    }
  }
  return aggregate(std::move(scores));
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream global(dir / "global.csv");
  global << "J-Mean,F-Mean,J&F-Mean\n" << fmt(report.j_mean) << ',' << fmt(report.f_mean) << ',' << fmt(report.jf_mean) << '\n';
  std::ofstream per(dir / "per_sequence.csv");
  per << "seq,obj,J-Mean,F-Mean\n";
  for (const auto& s : report.objects) {
    per << s.sequence << ',' << s.object_id << ',' << fmt(s.j_mean) << ',' << fmt(s.f_mean) << '\n';
  }
}

}  // namespace sketchvos::metrics
