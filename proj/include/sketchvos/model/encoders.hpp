#pragma once

#include <vector>

#include "sketchvos/model/layers.hpp"

namespace sketchvos::model {

struct EncoderConfig {
  std::vector<int> widths{16, 32, 64, 96};  // stages at strides 2, 4, 8, 16
  int key_dim = 16;
  int value_dim = 32;

  /// Throws ConfigError when a dimension is < 1, widths has other than 4
  /// stages, or key_dim exceeds the last width.
  void validate() const;
  int l3_channels() const { return widths[1]; }
  int l4_channels() const { return widths[2]; }
  int l5_channels() const { return widths[3]; }
};

/// Throws ShapeError unless both sides are positive multiples of 16.
void require_divisible_by_16(int height, int width, const char* what);

template <typename T>
struct VisualFeatures {
  Var<T> l3;   // C3 x H/4 x W/4
  Var<T> l4;   // C4 x H/8 x W/8
  Var<T> l5;   // C5 x H/16 x W/16
  Var<T> key;  // C_k x H/16 x W/16
};

template <typename T>
struct SketchFeatures {
  Var<T> l4;
  Var<T> l5;
  Var<T> gap;  // C5 x 1 x 1
};

/// Four stride-2 stages of two 3x3 conv + ReLU each.
template <typename T>
struct StageEncoder {
  std::vector<Conv<T>> convs;

  StageEncoder() = default;
  StageEncoder(int in_channels, const std::vector<int>& widths, std::mt19937_64& rng);
  /// Outputs of the four stages.
  std::vector<Var<T>> forward(const Var<T>& x) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

template <typename T>
struct FrameEncoder {
  StageEncoder<T> stages;
  Conv<T> key_head;

  FrameEncoder() = default;
  FrameEncoder(const EncoderConfig& cfg, std::mt19937_64& rng);
  /// image: 3 x H x W.
  VisualFeatures<T> operator()(const Var<T>& image) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

template <typename T>
struct ValueEncoder {
  StageEncoder<T> stages;
  Conv<T> head;

  ValueEncoder() = default;
  ValueEncoder(const EncoderConfig& cfg, std::mt19937_64& rng);
  /// image: 3 x H x W, aux: 1 x H x W. Returns C_v x H/16 x W/16.
  Var<T> operator()(const Var<T>& image, const Var<T>& aux) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

template <typename T>
struct SketchEncoder {
  StageEncoder<T> stages;

  SketchEncoder() = default;
  SketchEncoder(const EncoderConfig& cfg, std::mt19937_64& rng);
  /// raster: 1 x H x W.
  SketchFeatures<T> operator()(const Var<T>& raster) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

/// 1x1 conv to C channels, flattened to C x (h * w).
template <typename T>
Var<T> project(const Var<T>& feature, const Conv<T>& projection);

}  // namespace sketchvos::model
