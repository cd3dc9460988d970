#include "sketchvos/model/propagate.hpp"

#include "sketchvos/dataio/png_io.hpp"
#include "sketchvos/parallel.hpp"

namespace sketchvos::model {

std::vector<Tensor<float>> propagate_object(const Model<float>& model, const std::vector<RgbImage>& frames,
                                            const Mask& reference) {
  if (frames.empty()) throw ShapeError("propagate: empty sequence");
  require_divisible_by_16(frames.front().height(), frames.front().width(), "propagate");
  numerics::NoGradGuard no_grad;
  const int every_k = model.config.every_k;
  const auto trace = model.run([&](int t) { return Var<float>(image_tensor<float>(frames[t])); },
                               static_cast<int>(frames.size()), Var<float>(mask_tensor<float>(reference)),
                               [every_k](int t) { return should_insert(t, every_k); });
  std::vector<Tensor<float>> out;
  out.reserve(trace.probs.size());
  for (const auto& p : trace.probs) out.push_back(p.value());
  return out;
}

std::vector<LabelMap> predict_sequence(const Model<float>& model, const dataio::LoadedSequence& seq,
                                       const std::vector<refgen::Reference>& references) {
  const auto& ids = seq.video.object_ids;
  if (references.size() != ids.size()) throw ShapeError("predict_sequence: one reference per object required");
  const int T = seq.video.length(), H = seq.video.height(), W = seq.video.width();
  std::vector<std::vector<Tensor<float>>> soft;
  for (const auto& ref : references) soft.push_back(propagate_object(model, seq.video.frames, ref.raster));
  std::vector<LabelMap> labels;
  for (int t = 0; t < T; ++t) {
    std::vector<std::vector<float>> probs;
    for (const auto& s : soft) probs.emplace_back(s[t].storage().begin(), s[t].storage().end());
    labels.push_back(combine_objects(ids, probs, H, W));
  }
  return labels;
}

void predict_dataset(const Model<float>& model, const dataio::DatasetIndex& index,
                     const std::filesystem::path& pred_root) {
  parallel_for(index.sequences.size(), [&](std::size_t i) {
    const auto& entry = index.sequences[i];
    const dataio::LoadedSequence seq = dataio::load_sequence(entry);
    std::vector<refgen::Reference> refs;
    for (int id : entry.object_ids) {
      refs.push_back(dataio::resolve_reference(entry, seq, id, model.config.reference_kind));
    }
    const auto labels = predict_sequence(model, seq, refs);
    const auto dir = pred_root / entry.name;
    std::filesystem::create_directories(dir);
    for (std::size_t t = 0; t < labels.size(); ++t) {
      dataio::write_label_png(dir / dataio::frame_file_name(static_cast<int>(t)), labels[t]);
    }
  });
}

}  // namespace sketchvos::model
