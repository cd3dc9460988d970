#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sketchvos/image.hpp"
#include "sketchvos/refgen/raster.hpp"

namespace sketchvos::refgen {

enum class ReferenceKind { sketch, scribble, click, cross, circle, box, contour, mask };

std::string_view to_string(ReferenceKind kind);
/// Throws ConfigError for names outside the enum.
ReferenceKind parse_reference_kind(std::string_view name);
const std::vector<ReferenceKind>& all_reference_kinds();

/// Free-hand drawing: strokes in pixel coordinates plus their rasterization.
struct SketchRaster {
  Mask canvas;
  std::vector<Polyline> strokes;
  int stroke_width = 2;
  bool closed = false;  // whether each stroke is drawn as a closed loop
};

struct Reference {
  ReferenceKind kind = ReferenceKind::sketch;
  Mask raster;
  int source_object = 0;
};

/// Re-rasterizes strokes on a blank height x width canvas.
SketchRaster rasterize_sketch(std::vector<Polyline> strokes, int height, int width, int stroke_width,
                              bool closed);

/// Tight box of all stroke vertices, rounded outward.
BBox stroke_bbox(const std::vector<Polyline>& strokes);

/// Maps strokes affinely (independent x and y scale) so their vertex bbox
/// coincides with `target`, then re-rasterizes on a blank canvas. An axis
/// with zero extent is centred in the target. Throws EmptyReferenceError for
/// a sketch without vertices, ShapeError when the target leaves the canvas.
SketchRaster align_sketch(const SketchRaster& sketch, const BBox& target, int height, int width);

/// Procedural sketch: outer boundary of the largest component, simplified to
/// at most 64 vertices, each jittered uniformly in [-jitter, jitter]^2.
SketchRaster synth_sketch_from_mask(const Mask& mask, double jitter_px, std::mt19937_64& rng);

/// Mask centroid rounded to the nearest pixel, snapped to the nearest mask
/// pixel (row-major tie break) when it lands on background.
Pixel reference_center(const Mask& mask);

/// kind = click: radius-2 disk at the centre, restricted to the mask.
/// kind = cross: '+' with arms of cross_half_length_for(canvas), clipped.
Reference gen_point_ref(const Mask& mask, ReferenceKind kind, int object_id = 0);

/// kind = box: outline of the tight bbox, stroke grown inward.
/// kind = circle: ring of stroke width inside the circle through the bbox
/// corners (centre = bbox centre, radius = half diagonal).
Reference gen_fit_ref(const Mask& mask, ReferenceKind kind, int object_id = 0);

/// Outline of the convex hull of the sketch's foreground pixels.
Reference gen_contour(const SketchRaster& sketch, int object_id = 0);
Reference gen_contour(const Mask& sketch_raster, int object_id = 0);

/// Skeleton of the mask (largest component of the thinned mask); falls back
/// to the centre click when fewer than 5 skeleton pixels survive.
Reference gen_scribble(const Mask& mask, int object_id = 0);

/// Dispatches on kind for every mask-derived reference. `sketch` must be
/// provided for kind = contour and kind = sketch.
Reference make_reference(ReferenceKind kind, const Mask& gt_mask, const std::optional<SketchRaster>& sketch,
                         int object_id);

}  // namespace sketchvos::refgen
