#include "sketchvos/dataio/sampling.hpp"

namespace sketchvos::dataio {

std::vector<std::array<int, 2>> clip_pairs(int length, int window) {
  std::vector<std::array<int, 2>> pairs;
  for (int i = 1; i < length; ++i) {
    for (int j = i + 1; j < length && j - i <= window; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

TrainingClip sample_clip(const LoadedSequence& seq, int object_id, const Mask& reference, std::mt19937_64& rng,
                         int window) {
  const int length = seq.video.length();
  if (length < 3) {
    throw SamplingError(seq.video.name + ": needs at least 3 frames, has " + std::to_string(length));
  }
  if (window < 1) throw ConfigError("sampling window must be positive");
  const ObjectAnnotation* obj = nullptr;
  for (const auto& o : seq.objects) {
    if (o.object_id == object_id) obj = &o;
  }
  if (!obj || obj->masks.empty() || count_foreground(obj->masks.front()) == 0) {
    throw SamplingError(seq.video.name + ": object " + std::to_string(object_id) + " has no first-frame mask");
  }
  const auto pairs = clip_pairs(length, window);
  const auto [i, j] = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
  TrainingClip clip;
  clip.sequence = seq.video.name;
  clip.object_id = object_id;
  clip.indices = {0, i, j};
  for (int k = 0; k < 3; ++k) {
    clip.frames[k] = seq.video.frames[clip.indices[k]];
    clip.masks[k] = obj->masks[clip.indices[k]];
  }
  clip.reference = reference;
  return clip;
}

}  // namespace sketchvos::dataio
