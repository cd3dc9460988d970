#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sketchvos/refgen/refgen.hpp"

using namespace sketchvos;
using namespace sketchvos::refgen;

namespace {

Mask rect_mask(int h, int w, int x0, int y0, int x1, int y1) {
  Mask m(h, w);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.at(y, x) = 1;
  return m;
}

Mask disk_mask(int h, int w, double cx, double cy, double r) {
  Mask m(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.at(y, x) = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r ? 1 : 0;
  return m;
}

// Random union of a few disks and rectangles.
Mask random_blob(int h, int w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> px(4, w - 5), py(4, h - 5), rad(1, 6);
  Mask m(h, w);
  const int parts = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < parts; ++i) {
    const Mask d = disk_mask(h, w, px(rng), py(rng), rad(rng));
    for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] |= d.data()[k];
  }
  return m;
}

bool binary(const Mask& m) {
  for (auto v : m.data())
    if (v > 1) return false;
  return true;
}

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.data()[i] && !b.data()[i]) return false;
  return true;
}

}  // namespace

TEST(AlignSketch, IdentityTranslationAndScale) {
  const Polyline stroke{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {5, 5}};
  SketchRaster s = rasterize_sketch({stroke}, 64, 64, 2, false);

  SketchRaster same = align_sketch(s, {0, 0, 10, 10}, 64, 64);
  EXPECT_EQ(same.strokes, s.strokes);
  EXPECT_EQ(same.canvas, s.canvas);

  SketchRaster moved = align_sketch(s, {5, 5, 15, 15}, 64, 64);
  for (std::size_t i = 0; i < stroke.size(); ++i) {
    EXPECT_DOUBLE_EQ(moved.strokes[0][i].x, stroke[i].x + 5);
    EXPECT_DOUBLE_EQ(moved.strokes[0][i].y, stroke[i].y + 5);
  }

  SketchRaster scaled = align_sketch(s, {0, 0, 20, 40}, 64, 64);
  for (std::size_t i = 0; i < stroke.size(); ++i) {
    EXPECT_DOUBLE_EQ(scaled.strokes[0][i].x, stroke[i].x * 2);
    EXPECT_DOUBLE_EQ(scaled.strokes[0][i].y, stroke[i].y * 4);
  }
}

TEST(AlignSketch, OutputBBoxWithinOnePixelOfTarget) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Mask blob = random_blob(64, 64, rng);
    SketchRaster s = synth_sketch_from_mask(blob, 2.0, rng);
    std::uniform_int_distribution<int> a(0, 40), len(0, 20);
    BBox target{a(rng), a(rng), 0, 0};
    target.x1 = target.x0 + len(rng);
    target.y1 = target.y0 + len(rng);
    SketchRaster out = align_sketch(s, target, 64, 64);
    const BBox got = mask_bbox(out.canvas);
    EXPECT_LE(std::abs(got.x0 - target.x0), 1);
    EXPECT_LE(std::abs(got.y0 - target.y0), 1);
    EXPECT_LE(std::abs(got.x1 - target.x1), 1);
    EXPECT_LE(std::abs(got.y1 - target.y1), 1);
  }
}

TEST(AlignSketch, Errors) {
  SketchRaster empty{Mask(16, 16), {}, 2, false};
  EXPECT_THROW(align_sketch(empty, {0, 0, 3, 3}, 16, 16), EmptyReferenceError);
  SketchRaster s = rasterize_sketch({{{1, 1}, {4, 4}}}, 16, 16, 2, false);
  EXPECT_THROW(align_sketch(s, {0, 0, 16, 3}, 16, 16), ShapeError);
}

TEST(SynthSketch, SquareWithoutJitterIsDilatedBoundary) {
  const Mask square = rect_mask(64, 64, 10, 12, 40, 30);
  std::mt19937_64 rng(3);
  SketchRaster s = synth_sketch_from_mask(square, 0.0, rng);

  // Oracle: pixels of the square on its edge, dilated by a 2x2 brush toward +x/+y.
  Mask expected(64, 64);
  for (int y = 12; y <= 30; ++y)
    for (int x = 10; x <= 40; ++x) {
      if (x != 10 && x != 40 && y != 12 && y != 30) continue;
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) expected.at(y + dy, x + dx) = 1;
    }
  EXPECT_EQ(s.canvas, expected);
  EXPECT_LE(s.strokes[0].size(), 64u);
}

TEST(SynthSketch, DeterministicAndBounded) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask blob = random_blob(64, 64, gen);
    std::mt19937_64 r1(77), r2(77);
    const SketchRaster a = synth_sketch_from_mask(blob, 1.5, r1);
    const SketchRaster b = synth_sketch_from_mask(blob, 1.5, r2);
    EXPECT_EQ(a.canvas, b.canvas);
    EXPECT_EQ(a.strokes, b.strokes);
    EXPECT_LE(a.strokes[0].size(), 64u);
    EXPECT_GT(count_foreground(a.canvas), 0u);
    EXPECT_TRUE(binary(a.canvas));
  }
}

TEST(SynthSketch, SinglePixelIsADot) {
  Mask m(64, 64);
  m.at(7, 9) = 1;
  std::mt19937_64 rng(1);
  SketchRaster s = synth_sketch_from_mask(m, 0.0, rng);
  ASSERT_EQ(s.strokes.size(), 1u);
  EXPECT_EQ(s.strokes[0].size(), 1u);
  EXPECT_EQ(s.canvas, rect_mask(64, 64, 9, 7, 10, 8));
  EXPECT_THROW(synth_sketch_from_mask(Mask(16, 16), 0.0, rng), EmptyReferenceError);
}

TEST(PointRefs, CenteredDiskAndRingSnap) {
  const Mask disk = disk_mask(64, 64, 30, 22, 8);
  EXPECT_EQ(reference_center(disk), (Pixel{30, 22}));
  const Reference click = gen_point_ref(disk, ReferenceKind::click);
  EXPECT_EQ(count_foreground(click.raster), 13u);  // radius-2 lattice disk
  EXPECT_TRUE(click.raster.at(22, 30));

  Mask ring = disk_mask(64, 64, 32, 32, 12);
  const Mask hole = disk_mask(64, 64, 32, 32, 8);
  for (std::size_t i = 0; i < ring.size(); ++i) ring.data()[i] &= !hole.data()[i];
  const Pixel c = reference_center(ring);
  // Brute-force nearest ring pixel to the rounded centroid (32, 32).
  long long best = 1LL << 60;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (ring.at(y, x)) best = std::min<long long>(best, (x - 32) * (x - 32) + (y - 32) * (y - 32));
  EXPECT_TRUE(ring.at(c.y, c.x));
  EXPECT_EQ((c.x - 32) * (c.x - 32) + (c.y - 32) * (c.y - 32), best);
}

TEST(PointRefs, CrossAtCornerIsClipped) {
  const Mask corner = rect_mask(64, 64, 0, 0, 2, 2);
  const Reference cross = gen_point_ref(corner, ReferenceKind::cross);
  EXPECT_EQ(cross.raster.height(), 64);
  EXPECT_EQ(cross.raster.width(), 64);
  EXPECT_TRUE(binary(cross.raster));
  EXPECT_TRUE(cross.raster.at(1, 1));
  EXPECT_TRUE(cross.raster.at(1, 7));  // arm end (centre 1 + half-length 6)
  EXPECT_TRUE(cross.raster.at(7, 1));
  EXPECT_FALSE(cross.raster.at(1, 9));
  EXPECT_THROW(gen_point_ref(Mask(8, 8), ReferenceKind::click), EmptyReferenceError);
}

TEST(FitRefs, DegenerateAndFullCanvas) {
  Mask px(16, 16);
  px.at(4, 3) = 1;
  const Reference box = gen_fit_ref(px, ReferenceKind::box);
  EXPECT_EQ(box.raster, px);
  const Reference circle = gen_fit_ref(px, ReferenceKind::circle);
  EXPECT_EQ(circle.raster, px);

  const Mask full(16, 16, 1);
  const Reference border = gen_fit_ref(full, ReferenceKind::box);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool edge = std::min({x, 15 - x, y, 15 - y}) < stroke_width_for(16, 16);
      EXPECT_EQ(border.raster.at(y, x), edge ? 1 : 0);
    }
}

TEST(FitRefs, CircleThroughBBoxCornersOfLShape) {
  Mask l = rect_mask(64, 64, 2, 2, 4, 6);
  for (int x = 2; x <= 10; ++x) l.at(6, x) = 1;
  EXPECT_EQ(mask_bbox(l), (BBox{2, 2, 10, 6}));
  const Reference circle = gen_fit_ref(l, ReferenceKind::circle);
  const double r = std::sqrt(20.0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double d = std::hypot(x - 6.0, y - 4.0);
      const bool on = d <= r + 1e-9 && d > r - 2 + 1e-9;
      EXPECT_EQ(circle.raster.at(y, x), on ? 1 : 0) << x << "," << y;
    }
  EXPECT_TRUE(circle.raster.at(2, 2));
  EXPECT_TRUE(circle.raster.at(6, 10));
}

TEST(Contour, TriangleAndCollinearDots) {
  Mask dots(32, 32);
  dots.at(5, 5) = dots.at(5, 25) = dots.at(20, 15) = 1;
  const Reference tri = gen_contour(dots);
  EXPECT_TRUE(tri.raster.at(5, 5));
  EXPECT_TRUE(tri.raster.at(5, 25));
  EXPECT_TRUE(tri.raster.at(20, 15));
  EXPECT_TRUE(tri.raster.at(5, 15));     // top edge midpoint
  EXPECT_FALSE(tri.raster.at(10, 15));   // interior stays empty

  Mask line(32, 32);
  line.at(10, 4) = line.at(10, 12) = line.at(10, 20) = 1;
  const Reference seg = gen_contour(line);
  EXPECT_EQ(stroke_width_for(32, 32), 1);
  EXPECT_EQ(mask_bbox(seg.raster), (BBox{4, 10, 20, 10}));
  EXPECT_EQ(count_foreground(seg.raster), 17u);
  EXPECT_THROW(gen_contour(Mask(8, 8)), EmptyReferenceError);
}

TEST(Contour, HullContainsSketchExtremes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask blob = disk_mask(64, 64, 20 + trial, 30, 6 + trial % 5);
    const Reference c = gen_contour(blob);
    const BBox sb = mask_bbox(blob), cb = mask_bbox(c.raster);
    EXPECT_LE(cb.x0, sb.x0);
    EXPECT_LE(cb.y0, sb.y0);
    EXPECT_GE(cb.x1, sb.x1);
    EXPECT_GE(cb.y1, sb.y1);
  }
}

TEST(Scribble, BarSkeletonFollowsCenterRow) {
  const Mask bar = rect_mask(64, 64, 5, 20, 50, 24);
  const Reference s = gen_scribble(bar);
  EXPECT_TRUE(subset(s.raster, bar));
  std::size_t on_center = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (s.raster.at(y, x)) {
        EXPECT_GE(y, 21);
        EXPECT_LE(y, 23);
        on_center += y == 22;
      }
  EXPECT_GE(on_center, 30u);

  Mask two(16, 16);
  two.at(3, 3) = two.at(3, 4) = 1;
  const Reference fb = gen_scribble(two);
  EXPECT_EQ(fb.kind, ReferenceKind::scribble);
  EXPECT_EQ(fb.raster, two);  // click restricted to the mask
}

TEST(References, PropertiesOnRandomMasks) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 32 + 16 * (trial % 3), w = 64;
    const Mask m = random_blob(h, w, rng);
    const BBox mb = mask_bbox(m);
    for (ReferenceKind kind : {ReferenceKind::click, ReferenceKind::cross, ReferenceKind::box,
                               ReferenceKind::circle, ReferenceKind::scribble}) {
      const Reference r1 = make_reference(kind, m, std::nullopt, 1);
      const Reference r2 = make_reference(kind, m, std::nullopt, 1);
      EXPECT_EQ(r1.raster, r2.raster);
      EXPECT_EQ(r1.raster.height(), h);
      EXPECT_EQ(r1.raster.width(), w);
      EXPECT_TRUE(binary(r1.raster));
      if (kind == ReferenceKind::click || kind == ReferenceKind::scribble) {
        EXPECT_TRUE(subset(r1.raster, m));
      }
      if (kind == ReferenceKind::cross) {
        const Pixel c = reference_center(m);
        EXPECT_TRUE(m.at(c.y, c.x));
        EXPECT_TRUE(r1.raster.at(c.y, c.x));
      }
      if (kind == ReferenceKind::box) {
        EXPECT_EQ(mask_bbox(r1.raster), mb);
      }
      if (kind == ReferenceKind::circle) {
        const double cx = 0.5 * (mb.x0 + mb.x1), cy = 0.5 * (mb.y0 + mb.y1);
        const double r = 0.5 * std::hypot(mb.x1 - mb.x0, mb.y1 - mb.y0);
        for (int y = mb.y0; y <= mb.y1; ++y)
          for (int x = mb.x0; x <= mb.x1; ++x) EXPECT_LE(std::hypot(x - cx, y - cy), r + 1e-9);
        EXPECT_TRUE(r1.raster.at(mb.y0, mb.x0));
      }
    }
  }
  EXPECT_THROW(make_reference(ReferenceKind::contour, Mask(8, 8, 1), std::nullopt, 1), ConfigError);
}

TEST(Raster, ConvexHullAndTracing) {
  auto hull = convex_hull({{0, 0}, {4, 0}, {4, 4}, {0, 4}, {2, 2}, {2, 0}});
  EXPECT_EQ(hull.size(), 4u);
  const Mask sq = rect_mask(10, 10, 2, 2, 5, 5);
  auto loop = trace_outer_boundary(sq);
  EXPECT_EQ(loop.size(), 12u);
  EXPECT_EQ(drop_collinear(loop).size(), 4u);
}
