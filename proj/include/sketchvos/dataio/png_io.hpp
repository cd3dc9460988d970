#pragma once

#include <array>
#include <filesystem>

#include "sketchvos/image.hpp"

namespace sketchvos::dataio {

using Palette = std::array<std::array<std::uint8_t, 3>, 256>;

/// Pascal-VOC/DAVIS colour map: index 0 black, 1 dark red, 2 dark green, ...
const Palette& davis_palette();

void write_rgb_png(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_rgb_png(const std::filesystem::path& path);

/// Palette-indexed PNG storing object ids directly as indices.
void write_label_png(const std::filesystem::path& path, const LabelMap& labels);
/// Reads palette indices; 8-bit grayscale files are accepted as raw indices.
LabelMap read_label_png(const std::filesystem::path& path);

/// Binary raster as 8-bit grayscale {0, 255}.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
/// Any nonzero sample maps to 1.
Mask read_mask_png(const std::filesystem::path& path);

}  // namespace sketchvos::dataio
