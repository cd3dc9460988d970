#pragma once

#include <vector>

#include "sketchvos/image.hpp"

namespace sketchvos::refgen {

struct Point {
  double x = 0, y = 0;
  bool operator==(const Point&) const = default;
};
using Polyline = std::vector<Point>;

struct Pixel {
  int x = 0, y = 0;
  bool operator==(const Pixel&) const = default;
};

/// Stamps a w x w square brush covering offsets [-(w-1)/2, w/2] around (x, y),
/// clipped to the canvas. Width 2 therefore covers the pixel and its
/// right/bottom neighbours.
void stamp(Mask& canvas, int x, int y, int width);

/// Bresenham segment between rounded endpoints, drawn with `stamp`.
void draw_segment(Mask& canvas, Point a, Point b, int width);

/// Draws consecutive segments; a single-vertex polyline renders as one stamp.
void draw_polyline(Mask& canvas, const Polyline& line, int width, bool closed);

/// Brush width for a canvas: 2 px at 64x64, scaled with the diagonal.
int stroke_width_for(int height, int width);
/// Cross arm half-length: 6 px at 64x64, scaled with the diagonal.
int cross_half_length_for(int height, int width);

/// Per-pixel component labels (0 = background, 1..n) with 8-connectivity.
struct Components {
  Plane<int> labels;
  std::vector<int> sizes;  // sizes[k] for label k + 1
  /// Label of the largest component (lowest label on ties), 0 if none.
  int largest() const;
};
Components connected_components(const Mask& mask);

/// Keeps only the largest 8-connected component.
Mask largest_component(const Mask& mask);

/// Ordered outer boundary of the component containing the first foreground
/// pixel in raster order (Moore-neighbour tracing, clockwise on screen). A
/// single pixel yields a one-element contour.
std::vector<Pixel> trace_outer_boundary(const Mask& mask);

/// Drops vertices collinear with both neighbours on a closed loop.
std::vector<Pixel> drop_collinear(const std::vector<Pixel>& loop);

/// Andrew's monotone chain; counter-clockwise in math orientation without
/// collinear vertices. Collinear input yields the two extreme points.
std::vector<Pixel> convex_hull(std::vector<Pixel> points);

/// Zhang-Suen thinning. Out-of-canvas pixels count as background.
Mask thin(const Mask& mask);

/// Foreground pixels with at least one background 4-neighbour; out-of-canvas
/// neighbours count as background.
Mask inner_boundary(const Mask& mask);

}  // namespace sketchvos::refgen
