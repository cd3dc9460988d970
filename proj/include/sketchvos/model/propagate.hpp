#pragma once

#include <filesystem>
#include <vector>

#include "sketchvos/dataio/dataset.hpp"
#include "sketchvos/model/model.hpp"

namespace sketchvos::model {

/// Soft masks (H x W, values in [0, 1]) for one object over every frame, with
/// the model's insertion policy. No gradients are recorded.
std::vector<Tensor<float>> propagate_object(const Model<float>& model, const std::vector<RgbImage>& frames,
                                            const Mask& reference);

/// Per-object propagation combined into one label map per frame.
std::vector<LabelMap> predict_sequence(const Model<float>& model, const dataio::LoadedSequence& seq,
                                       const std::vector<refgen::Reference>& references);

/// Predicts every sequence of `index` with references of the model's kind and
/// writes <pred_root>/<seq>/NNNNN.png. Sequences run in parallel.
void predict_dataset(const Model<float>& model, const dataio::DatasetIndex& index,
                     const std::filesystem::path& pred_root);

}  // namespace sketchvos::model
