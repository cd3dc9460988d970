#include "sketchvos/refgen/refgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sketchvos::refgen {
namespace {

constexpr std::array<std::pair<ReferenceKind, std::string_view>, 8> kKindNames{{
    {ReferenceKind::sketch, "sketch"},
    {ReferenceKind::scribble, "scribble"},
    {ReferenceKind::click, "click"},
    {ReferenceKind::cross, "cross"},
    {ReferenceKind::circle, "circle"},
    {ReferenceKind::box, "box"},
    {ReferenceKind::contour, "contour"},
    {ReferenceKind::mask, "mask"},
}};

constexpr std::size_t kMaxSketchVertices = 64;

void require_nonempty(const Mask& mask, const char* what) {
  if (count_foreground(mask) == 0) throw EmptyReferenceError(std::string(what) + ": mask is empty");
}

}  // namespace

std::string_view to_string(ReferenceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ReferenceKind parse_reference_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown reference kind '" + std::string(name) +
                    "' (expected sketch, scribble, click, cross, circle, box, contour or mask)");
}

const std::vector<ReferenceKind>& all_reference_kinds() {
  static const std::vector<ReferenceKind> kinds = [] {
    std::vector<ReferenceKind> v;
    for (const auto& [k, n] : kKindNames) v.push_back(k);
    return v;
  }();
  return kinds;
}

SketchRaster rasterize_sketch(std::vector<Polyline> strokes, int height, int width, int stroke_width,
                              bool closed) {
  SketchRaster out{Mask(height, width), std::move(strokes), stroke_width, closed};
  for (const auto& s : out.strokes) draw_polyline(out.canvas, s, stroke_width, closed);
  return out;
}

BBox stroke_bbox(const std::vector<Polyline>& strokes) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& s : strokes) {
    for (const Point& p : s) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  if (x1 < x0) throw EmptyReferenceError("sketch has no stroke vertices");
  return {static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)), static_cast<int>(std::ceil(x1)),
          static_cast<int>(std::ceil(y1))};
}

SketchRaster align_sketch(const SketchRaster& sketch, const BBox& target, int height, int width) {
  if (target.x0 < 0 || target.y0 < 0 || target.x1 >= width || target.y1 >= height || target.x1 < target.x0 ||
      target.y1 < target.y0) {
    throw ShapeError("align_sketch: target bbox outside the canvas");
  }
  double sx0 = std::numeric_limits<double>::infinity(), sy0 = sx0, sx1 = -sx0, sy1 = -sx0;
  for (const auto& s : sketch.strokes) {
    for (const Point& p : s) {
      sx0 = std::min(sx0, p.x);
      sy0 = std::min(sy0, p.y);
      sx1 = std::max(sx1, p.x);
      sy1 = std::max(sy1, p.y);
    }
  }
  if (sx1 < sx0) throw EmptyReferenceError("align_sketch: sketch is empty");

  auto map_axis = [](double v, double s0, double s1, int t0, int t1) {
    if (s1 == s0) return 0.5 * (t0 + t1);
    return t0 + (v - s0) * (t1 - t0) / (s1 - s0);
  };
  std::vector<Polyline> mapped = sketch.strokes;
  for (auto& s : mapped) {
    for (Point& p : s) {
      p.x = map_axis(p.x, sx0, sx1, target.x0, target.x1);
      p.y = map_axis(p.y, sy0, sy1, target.y0, target.y1);
    }
  }
  return rasterize_sketch(std::move(mapped), height, width, sketch.stroke_width, sketch.closed);
}

SketchRaster synth_sketch_from_mask(const Mask& mask, double jitter_px, std::mt19937_64& rng) {
  require_nonempty(mask, "synth_sketch_from_mask");
  std::vector<Pixel> loop = drop_collinear(trace_outer_boundary(largest_component(mask)));
  if (loop.size() > kMaxSketchVertices) {
    std::vector<Pixel> sampled;
    sampled.reserve(kMaxSketchVertices);
    for (std::size_t i = 0; i < kMaxSketchVertices; ++i) sampled.push_back(loop[i * loop.size() / kMaxSketchVertices]);
    loop = std::move(sampled);
  }
  std::uniform_real_distribution<double> jitter(-jitter_px, jitter_px);
  Polyline stroke;
  stroke.reserve(loop.size());
  for (const Pixel& p : loop) {
    Point q{static_cast<double>(p.x), static_cast<double>(p.y)};
    if (jitter_px > 0) {
      q.x += jitter(rng);
      q.y += jitter(rng);
    }
    stroke.push_back(q);
  }
  return rasterize_sketch({std::move(stroke)}, mask.height(), mask.width(),
                          stroke_width_for(mask.height(), mask.width()), /*closed=*/true);
}

Pixel reference_center(const Mask& mask) {
  require_nonempty(mask, "reference_center");
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(y, x)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  const Pixel c{static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n))};
  if (mask.get_or(c.y, c.x, 0)) return c;
  Pixel best{};
  long long best_d = std::numeric_limits<long long>::max();
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      const long long d = static_cast<long long>(x - c.x) * (x - c.x) + static_cast<long long>(y - c.y) * (y - c.y);
      if (d < best_d) {
        best_d = d;
        best = {x, y};
      }
    }
  }
  return best;
}

Reference gen_point_ref(const Mask& mask, ReferenceKind kind, int object_id) {
  if (kind != ReferenceKind::click && kind != ReferenceKind::cross) {
    throw ConfigError("gen_point_ref: kind must be click or cross");
  }
  const Pixel c = reference_center(mask);
  Reference ref{kind, Mask(mask.height(), mask.width()), object_id};
  if (kind == ReferenceKind::click) {
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        if (dx * dx + dy * dy <= 4 && mask.get_or(c.y + dy, c.x + dx, 0)) ref.raster.at(c.y + dy, c.x + dx) = 1;
      }
    }
    return ref;
  }
  const int arm = cross_half_length_for(mask.height(), mask.width());
  const int w = stroke_width_for(mask.height(), mask.width());
  const double cx = c.x, cy = c.y;
  draw_segment(ref.raster, {cx - arm, cy}, {cx + arm, cy}, w);
  draw_segment(ref.raster, {cx, cy - arm}, {cx, cy + arm}, w);
  return ref;
}

Reference gen_fit_ref(const Mask& mask, ReferenceKind kind, int object_id) {
  if (kind != ReferenceKind::box && kind != ReferenceKind::circle) {
    throw ConfigError("gen_fit_ref: kind must be box or circle");
  }
  const BBox b = mask_bbox(mask);
  const int w = stroke_width_for(mask.height(), mask.width());
  Reference ref{kind, Mask(mask.height(), mask.width()), object_id};
  if (kind == ReferenceKind::box) {
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        const int inset = std::min({x - b.x0, b.x1 - x, y - b.y0, b.y1 - y});
        if (inset < w) ref.raster.at(y, x) = 1;
      }
    }
    return ref;
  }
  const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
  const double r = 0.5 * std::hypot(static_cast<double>(b.x1 - b.x0), static_cast<double>(b.y1 - b.y0));
  constexpr double kSlack = 1e-9;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (d <= r + kSlack && d > r - w + kSlack) ref.raster.at(y, x) = 1;
    }
  }
  return ref;
}

Reference gen_contour(const Mask& sketch_raster, int object_id) {
  std::vector<Pixel> points;
  for (int y = 0; y < sketch_raster.height(); ++y) {
    for (int x = 0; x < sketch_raster.width(); ++x) {
      if (sketch_raster.at(y, x)) points.push_back({x, y});
    }
  }
  if (points.empty()) throw EmptyReferenceError("gen_contour: sketch is empty");
  const std::vector<Pixel> hull = convex_hull(std::move(points));
  Polyline outline;
  for (const Pixel& p : hull) outline.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  Reference ref{ReferenceKind::contour, Mask(sketch_raster.height(), sketch_raster.width()), object_id};
  draw_polyline(ref.raster, outline, stroke_width_for(sketch_raster.height(), sketch_raster.width()), true);
  return ref;
}

Reference gen_contour(const SketchRaster& sketch, int object_id) { return gen_contour(sketch.canvas, object_id); }

Reference gen_scribble(const Mask& mask, int object_id) {
  require_nonempty(mask, "gen_scribble");
  Mask skeleton = largest_component(thin(mask));
  if (count_foreground(skeleton) < 5) {
    Reference click = gen_point_ref(mask, ReferenceKind::click, object_id);
    click.kind = ReferenceKind::scribble;
    return click;
  }
  return {ReferenceKind::scribble, std::move(skeleton), object_id};
}

Reference make_reference(ReferenceKind kind, const Mask& gt_mask, const std::optional<SketchRaster>& sketch,
                         int object_id) {
  switch (kind) {
    case ReferenceKind::mask:
      require_nonempty(gt_mask, "mask reference");
      return {kind, gt_mask, object_id};
    case ReferenceKind::sketch:
      if (!sketch) throw ConfigError("sketch reference requested but no sketch is available");
      return {kind, sketch->canvas, object_id};
    case ReferenceKind::contour:
      if (!sketch) throw ConfigError("contour references require sketches (run gen-synth first)");
      return gen_contour(*sketch, object_id);
    case ReferenceKind::click:
    case ReferenceKind::cross:
      return gen_point_ref(gt_mask, kind, object_id);
    case ReferenceKind::box:
    case ReferenceKind::circle:
      return gen_fit_ref(gt_mask, kind, object_id);
    case ReferenceKind::scribble:
      return gen_scribble(gt_mask, object_id);
  }
  throw ConfigError("unhandled reference kind");
}

}  // namespace sketchvos::refgen
