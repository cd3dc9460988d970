#include "sketchvos/dataio/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"

#include "sketchvos/dataio/dataset.hpp"
#include "sketchvos/dataio/png_io.hpp"
#include "sketchvos/refgen/refgen.hpp"

namespace sketchvos::dataio {
namespace {

using json = nlohmann::json;

constexpr std::array<ShapeKind, 4> kShapes{ShapeKind::disk, ShapeKind::square, ShapeKind::triangle, ShapeKind::star};
constexpr int kMaxPlacementTries = 200;

struct Color {
  double r, g, b;
};

struct ObjectSpec {
  ShapeKind shape;
  int radius;
  Color color;
  Mask footprint;
  // position bounds for the template centre
  int x_lo, x_hi, y_lo, y_hi;
  double x0, y0, vx, vy;
  double amp, omega, phase;
};

bool inside_polygon(double px, double py, const std::vector<std::array<double, 2>>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a[1] > py) != (b[1] > py) && px < (b[0] - a[0]) * (py - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
  }
  return in;
}

// Reflects x into [lo, hi] as a triangle wave.
double fold(double x, double lo, double hi) {
  if (hi <= lo) return lo;
  const double span = hi - lo, period = 2 * span;
  double m = std::fmod(x - lo, period);
  if (m < 0) m += period;
  return lo + (m <= span ? m : period - m);
}

Color hsv(double h, double s, double v) {
  const double c = v * s, hp = h * 6, x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1)), m = v - c;
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = x;
  else if (hp < 2) r = x, g = c;
  else if (hp < 3) g = c, b = x;
  else if (hp < 4) g = x, b = c;
  else if (hp < 5) r = x, b = c;
  else r = c, b = x;
  return {255 * (r + m), 255 * (g + m), 255 * (b + m)};
}

std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

std::pair<int, int> position(const ObjectSpec& o, int t, Motion motion) {
  double x = o.x0 + o.vx * t, y = o.y0 + o.vy * t;
  if (motion == Motion::sinusoidal) {
    const double s = o.amp * std::sin(o.omega * t + o.phase);
    const double norm = std::max(1e-9, std::hypot(o.vx, o.vy));
    x += -o.vy / norm * s;
    y += o.vx / norm * s;
  }
  return {static_cast<int>(std::lround(fold(x, o.x_lo, o.x_hi))), static_cast<int>(std::lround(fold(y, o.y_lo, o.y_hi)))};
}

// Paints objects in id order (later ids on top) and returns the label map.
LabelMap render_labels(const std::vector<ObjectSpec>& objs, int t, Motion motion, int h, int w) {
  LabelMap labels(h, w);
  for (std::size_t k = 0; k < objs.size(); ++k) {
    const auto [cx, cy] = position(objs[k], t, motion);
    const int r = objs[k].radius;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (objs[k].footprint.at(dy + r, dx + r) && labels.in_bounds(cy + dy, cx + dx)) {
          labels.at(cy + dy, cx + dx) = static_cast<std::uint8_t>(k + 1);
        }
      }
    }
  }
  return labels;
}

struct Background {
  Color a, b;
  double dir_x, dir_y;
};

RgbImage render_frame(const Background& bg, const std::vector<ObjectSpec>& objs, const LabelMap& labels,
                      std::mt19937_64& rng) {
  const int h = labels.height(), w = labels.width();
  RgbImage img(h, w);
  std::uniform_real_distribution<double> noise(-8.0, 8.0);
  const double norm = std::abs(bg.dir_x) * (w - 1) + std::abs(bg.dir_y) * (h - 1) + 1e-9;
  const double offset = std::min(0.0, bg.dir_x) * (w - 1) + std::min(0.0, bg.dir_y) * (h - 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = (bg.dir_x * x + bg.dir_y * y - offset) / norm;
      Color c{bg.a.r + u * (bg.b.r - bg.a.r), bg.a.g + u * (bg.b.g - bg.a.g), bg.a.b + u * (bg.b.b - bg.a.b)};
      if (const int id = labels.at(y, x)) c = objs[id - 1].color;
      std::uint8_t* p = img.px(y, x);
      p[0] = clamp_u8(c.r + noise(rng));
      p[1] = clamp_u8(c.g + noise(rng));
      p[2] = clamp_u8(c.b + noise(rng));
    }
  }
  return img;
}

void write_json(const std::filesystem::path& path, const json& j) { std::ofstream(path) << j.dump(2) << '\n'; }

}  // namespace

std::string_view to_string(Motion m) { return m == Motion::linear ? "linear" : "sinusoidal"; }

Motion parse_motion(std::string_view name) {
  if (name == "linear") return Motion::linear;
  if (name == "sinusoidal") return Motion::sinusoidal;
  throw ConfigError("unknown motion '" + std::string(name) + "' (expected linear or sinusoidal)");
}

void validate(const SynthConfig& cfg) {
  if (cfg.n_objects < 1 || cfg.n_objects > 4) {
    throw ConfigError("objects must be in [1, 4], got " + std::to_string(cfg.n_objects));
  }
  if (cfg.height < 32 || cfg.width < 32) throw ConfigError("canvas must be at least 32x32");
  if (cfg.frames_per_seq < 3) throw ConfigError("frames per sequence must be at least 3");
  if (cfg.n_sequences < 0 || cfg.n_val_sequences < 0 || cfg.n_sequences + cfg.n_val_sequences < 1) {
    throw ConfigError("need at least one sequence");
  }
  if (cfg.distractor_mode && cfg.n_objects < 2) throw ConfigError("distractor mode needs at least 2 objects");
  if (cfg.sketch_jitter < 0) throw ConfigError("sketch jitter must be non-negative");
}

Mask shape_template(ShapeKind kind, int radius) {
  const int r = radius, side = 2 * r + 1;
  Mask m(side, side);
  std::vector<std::array<double, 2>> poly;
  const double pi = std::numbers::pi;
  if (kind == ShapeKind::triangle) {
    for (int k = 0; k < 3; ++k) {
      const double a = -pi / 2 + 2 * pi * k / 3;
      poly.push_back({r * std::cos(a), r * std::sin(a)});
    }
  } else if (kind == ShapeKind::star) {
    for (int k = 0; k < 10; ++k) {
      const double a = -pi / 2 + pi * k / 5, rr = k % 2 ? 0.45 * r : r;
      poly.push_back({rr * std::cos(a), rr * std::sin(a)});
    }
  }
  const int half = std::max(1, static_cast<int>(std::lround(0.8 * r)));
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      bool in = false;
      switch (kind) {
        case ShapeKind::disk: in = dx * dx + dy * dy <= r * r; break;
        case ShapeKind::square: in = std::abs(dx) <= half && std::abs(dy) <= half; break;
        default: in = inside_polygon(dx, dy, poly) || (dx == 0 && dy == 0); break;
      }
      m.at(dy + r, dx + r) = in ? 1 : 0;
    }
  }
  return m;
}

void gen_synthetic(const SynthConfig& cfg, std::uint64_t seed, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  validate(cfg);
  if (fs::exists(out) && !fs::is_directory(out)) throw ConfigError(out.string() + " is not a directory");
  if (fs::is_directory(out) && !fs::is_empty(out)) {
    if (!fs::exists(out / "meta.json")) {
      throw ConfigError("output directory " + out.string() + " is not empty and holds no dataset");
    }
    for (const char* owned : {"JPEGImages", "Annotations", "References", "meta.json"}) fs::remove_all(out / owned);
  }
  fs::create_directories(out);

  const int h = cfg.height, w = cfg.width;
  const double scale = std::min(h, w) / 64.0;
  const int total = cfg.n_sequences + cfg.n_val_sequences;
  json meta_seqs = json::object(), train_names = json::array(), val_names = json::array();

  for (int s = 0; s < total; ++s) {
    char name_buf[32];
    std::snprintf(name_buf, sizeof name_buf, "seq_%04d", s);
    const std::string name = name_buf;
    (s < cfg.n_sequences ? train_names : val_names).push_back(name);
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(sseq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Background bg{{uniform(30, 150), uniform(30, 150), uniform(30, 150)},
                  {uniform(30, 150), uniform(30, 150), uniform(30, 150)},
                  uniform(-1, 1), uniform(-1, 1)};

    const int lane_h = h / cfg.n_objects;
    std::vector<ObjectSpec> objs(cfg.n_objects);
    for (int k = 0; k < cfg.n_objects; ++k) {
      ObjectSpec& o = objs[k];
      int r = static_cast<int>(std::lround(uniform(6, 9) * scale));
      if (!cfg.occlusion) r = std::min(r, (lane_h - 1) / 2);
      o.radius = std::max(2, r);
      if (cfg.distractor_mode && k == 1) {
        o.shape = objs[0].shape;
        o.color = objs[0].color;
      } else {
        o.shape = kShapes[rng() % kShapes.size()];
        o.color = hsv(unit(rng), uniform(0.6, 1.0), uniform(0.75, 1.0));
      }
      o.footprint = shape_template(o.shape, o.radius);
      o.x_lo = o.radius;
      o.x_hi = w - 1 - o.radius;
      o.y_lo = cfg.occlusion ? o.radius : k * lane_h + o.radius;
      o.y_hi = cfg.occlusion ? h - 1 - o.radius : (k + 1) * lane_h - 1 - o.radius;
      const double speed = uniform(0.7, 1.8) * scale, angle = uniform(0, 2 * std::numbers::pi);
      o.vx = speed * std::cos(angle);
      o.vy = cfg.occlusion ? speed * std::sin(angle) : 0.3 * speed * std::sin(angle);
      o.amp = uniform(2, 6) * scale;
      o.omega = uniform(0.2, 0.5);
      o.phase = uniform(0, 2 * std::numbers::pi);
    }

    // Initial placement: every object at least half visible in frame 0.
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementTries && !placed; ++attempt) {
      for (auto& o : objs) {
        o.x0 = uniform(o.x_lo, o.x_hi);
        o.y0 = uniform(o.y_lo, o.y_hi);
      }
      const LabelMap first = render_labels(objs, 0, cfg.motion, h, w);
      placed = true;
      for (int k = 0; k < cfg.n_objects && placed; ++k) {
        placed = 2 * count_foreground(mask_for_label(first, k + 1)) >= count_foreground(objs[k].footprint);
      }
    }
    if (!placed) throw Error("could not place objects in sequence " + name);

    SequenceEntry entry;
    entry.name = name;
    entry.root = out;
    fs::create_directories(out / "JPEGImages" / name);
    fs::create_directories(out / "Annotations" / name);
    std::vector<std::vector<int>> absent(cfg.n_objects);
    LabelMap first_labels;
    for (int t = 0; t < cfg.frames_per_seq; ++t) {
      const LabelMap labels = render_labels(objs, t, cfg.motion, h, w);
      write_rgb_png(entry.frame_path(t), render_frame(bg, objs, labels, rng));
      write_label_png(entry.annotation_path(t), labels);
      for (int k = 0; k < cfg.n_objects; ++k) {
        if (count_foreground(mask_for_label(labels, k + 1)) == 0) absent[k].push_back(t);
      }
      if (t == 0) first_labels = labels;
    }

    json objects = json::object();
    for (int k = 0; k < cfg.n_objects; ++k) {
      const Mask m0 = mask_for_label(first_labels, k + 1);
      const refgen::SketchRaster raw = refgen::synth_sketch_from_mask(m0, cfg.sketch_jitter, rng);
      write_sketch(entry, k + 1, refgen::align_sketch(raw, mask_bbox(m0), h, w));
      objects[std::to_string(k + 1)] = {{"absent_frames", absent[k]}};
    }
    meta_seqs[name] = {{"n_frames", cfg.frames_per_seq}, {"objects", objects}};
  }

  json meta;
  meta["sequences"] = meta_seqs;
  meta["splits"] = {{"train", train_names}, {"val", val_names}};
  meta["generator"] = {{"seed", seed},
                       {"height", h},
                       {"width", w},
                       {"n_objects", cfg.n_objects},
                       {"distractor_mode", cfg.distractor_mode},
                       {"motion", std::string(to_string(cfg.motion))},
                       {"occlusion", cfg.occlusion},
                       {"sketch_jitter", cfg.sketch_jitter}};
  write_json(out / "meta.json", meta);
}

}  // namespace sketchvos::dataio
