#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "sketchvos/image.hpp"

namespace sketchvos::dataio {

enum class Motion { linear, sinusoidal };
enum class ShapeKind { disk, square, triangle, star };

std::string_view to_string(Motion m);
Motion parse_motion(std::string_view name);

struct SynthConfig {
  int n_sequences = 10;      // training split
  int n_val_sequences = 0;   // validation split, generated after the training ones
  int frames_per_seq = 20;
  int height = 64;
  int width = 64;
  int n_objects = 2;
  bool distractor_mode = false;
  Motion motion = Motion::linear;
  bool occlusion = false;
  double sketch_jitter = 1.5;  // px, uniform per sketch vertex
};

/// Throws ConfigError naming the offending field and its valid range.
void validate(const SynthConfig& cfg);

/// Binary footprint of a shape centred on the origin: pixel (dx, dy) with
/// |dx|, |dy| <= radius is set when its centre lies inside the shape.
Mask shape_template(ShapeKind kind, int radius);

/// Writes the full dataset layout under `out` (created if needed). Output is a
/// pure function of (cfg, seed).
void gen_synthetic(const SynthConfig& cfg, std::uint64_t seed, const std::filesystem::path& out);

}  // namespace sketchvos::dataio
