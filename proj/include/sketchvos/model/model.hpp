#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sketchvos/model/decoder.hpp"
#include "sketchvos/model/encoders.hpp"
#include "sketchvos/model/fusion.hpp"
#include "sketchvos/model/memory.hpp"
#include "sketchvos/refgen/refgen.hpp"

namespace sketchvos::model {

struct ModelConfig {
  EncoderConfig encoder;
  FusionConfig fusion;
  refgen::ReferenceKind reference_kind = refgen::ReferenceKind::sketch;
  int every_k = kDefaultEveryK;
  Affinity affinity = Affinity::l2;

  void validate() const;
};

/// The mask reference only makes sense as the concat design's memory aux.
void check_reference_compatible(refgen::ReferenceKind kind, Design design);

template <typename T>
struct PropagationTrace {
  std::vector<Var<T>> probs;  // H x W per frame
  bool first_supervised = false;
  std::vector<typename MemoryBank<T>::Entry> entries;
};

template <typename T>
struct Model {
  ModelConfig config;
  FrameEncoder<T> frame_enc;
  ValueEncoder<T> value_enc;
  SketchEncoder<T> sketch_enc;               // designs other than concat
  std::vector<CrossProjections<T>> cross;    // one per visual level (attention designs)
  Conv<T> adapter;                           // fused map (or L5 for convweight) -> C_v
  HyperNet<T> hyper;                         // convweight only
  Decoder<T> decoder;
  SegHead<T> head;                           // all designs but convweight

  Model() = default;
  Model(const ModelConfig& config, std::uint64_t seed);

  ParameterList<T> parameters();
  std::size_t parameter_count();

  VisualFeatures<T> encode_frame(const Var<T>& image) const { return frame_enc(image); }
  Var<T> encode_value(const Var<T>& image, const Var<T>& aux) const { return value_enc(image, aux); }
  SketchFeatures<T> encode_sketch(const Var<T>& raster) const { return sketch_enc(raster); }
  const Var<T>& sketch_level(const SketchFeatures<T>& s) const;

  /// First-frame decoder input (C_v channels) for designs other than concat.
  Var<T> fuse(const VisualFeatures<T>& frame, const SketchFeatures<T>& sketch) const;
  /// Learned head, or the hypernet head generated from the sketch embedding.
  HeadWeights<T> head_weights(const SketchFeatures<T>* sketch) const;
  /// H x W logits.
  Var<T> decode(const Var<T>& input, const VisualFeatures<T>& frame, const HeadWeights<T>& head_w, int h,
                int w) const {
    return decoder(input, frame.l4, frame.l3, head_w, h, w);
  }

  using FrameSource = std::function<Var<T>(int)>;
  using InsertRule = std::function<bool(int)>;

  /// Bootstrap on frame 0, then propagate through frames 1..n-1. Frame t's
  /// prediction enters memory when insert(t) holds; frame 0 always does.
  /// reference: 1 x H x W raster.
  PropagationTrace<T> run(const FrameSource& frames, int n_frames, const Var<T>& reference,
                          const InsertRule& insert) const;
};

}  // namespace sketchvos::model
