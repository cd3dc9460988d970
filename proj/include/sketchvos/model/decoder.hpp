#pragma once

#include "sketchvos/model/encoders.hpp"
#include "sketchvos/model/fusion.hpp"

namespace sketchvos::model {

inline constexpr int kSkipChannels = 16;

/// Learned segmentation head (the hypernet-generated one shares its layout).
template <typename T>
struct SegHead {
  Conv<T> c1;  // 3x3, C_dec -> 16
  Conv<T> c2;  // 1x1, 16 -> 1

  SegHead() = default;
  SegHead(int decoder_channels, std::mt19937_64& rng);
  HeadWeights<T> weights() const { return {c1.w.var, c1.b.var, c2.w.var, c2.b.var}; }
  void collect(ParameterList<T>& out, const std::string& name);
};

/// Logits at the input's resolution from a C_dec x h x w map.
template <typename T>
Var<T> apply_head(const Var<T>& x, const HeadWeights<T>& head);

/// Two refinement blocks (bilinear x2, concat compressed skip, 3x3 conv +
/// ReLU) from stride 16 to stride 4. A stride-8 input skips the first
/// upsample.
template <typename T>
struct Decoder {
  Conv<T> skip4;  // 1x1, C4 -> 16
  Conv<T> skip3;  // 1x1, C3 -> 16
  Conv<T> block1;
  Conv<T> block2;
  int channels = 0;

  Decoder() = default;
  Decoder(const EncoderConfig& cfg, std::mt19937_64& rng);

  /// input: C_v x H/16 x W/16 or C_v x H/8 x W/8. Returns H x W logits.
  Var<T> operator()(const Var<T>& input, const Var<T>& l4, const Var<T>& l3, const HeadWeights<T>& head,
                    int out_h, int out_w) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

}  // namespace sketchvos::model
