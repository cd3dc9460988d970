#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "sketchvos/dataio/dataset.hpp"

namespace sketchvos::dataio {

inline constexpr int kDefaultSampleWindow = 25;

/// Frames {0, i, j} of one object, with its first-frame reference.
struct TrainingClip {
  std::string sequence;
  int object_id = 0;
  std::array<int, 3> indices{};
  std::array<RgbImage, 3> frames;
  std::array<Mask, 3> masks;
  Mask reference;
};

/// All admissible (i, j): 1 <= i < j <= T - 1 and j - i <= window.
std::vector<std::array<int, 2>> clip_pairs(int length, int window = kDefaultSampleWindow);

/// Draws (i, j) uniformly from clip_pairs. Throws SamplingError for sequences
/// shorter than 3 frames or an object without a first-frame mask.
TrainingClip sample_clip(const LoadedSequence& seq, int object_id, const Mask& reference, std::mt19937_64& rng,
                         int window = kDefaultSampleWindow);

}  // namespace sketchvos::dataio
