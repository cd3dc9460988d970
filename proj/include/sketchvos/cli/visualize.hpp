#pragma once

#include <filesystem>
#include <vector>

#include "sketchvos/image.hpp"
#include "sketchvos/refgen/refgen.hpp"

namespace sketchvos::cli {

/// Object fill blended at 40% alpha in its palette colour, object contours at
/// full colour. Background pixels are untouched.
RgbImage render_overlay(const RgbImage& frame, const LabelMap& prediction);

/// Quarter-scale reference rasters in the top-left corner, one palette colour
/// per object over a dark box.
void draw_inset(RgbImage& frame, const std::vector<int>& object_ids, const std::vector<Mask>& references);

/// Renders every <predictions>/<seq>/NNNNN.png over its dataset frame into
/// <out>/<seq>/NNNNN.png; the first frame also carries the reference inset.
/// Returns the number of frames written.
int visualize(const std::filesystem::path& predictions, const std::filesystem::path& data,
              const std::filesystem::path& out, refgen::ReferenceKind kind);

}  // namespace sketchvos::cli
