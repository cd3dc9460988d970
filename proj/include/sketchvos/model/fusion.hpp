#pragma once

#include <string_view>
#include <vector>

#include "sketchvos/model/encoders.hpp"

namespace sketchvos::model {

enum class Design { concat, convweight, cross_kv, cross_q };
enum class SketchLevel { l4, l5, gap };
enum class VisualLevels { l4, l5, multi };

std::string_view to_string(Design d);
std::string_view to_string(SketchLevel l);
std::string_view to_string(VisualLevels l);
Design parse_design(std::string_view s);
SketchLevel parse_sketch_level(std::string_view s);
VisualLevels parse_visual_levels(std::string_view s);

struct FusionConfig {
  Design design = Design::cross_q;
  SketchLevel sketch_level = SketchLevel::l5;
  VisualLevels visual_levels = VisualLevels::l5;
  int channels = 32;
  bool tied_projections = false;  // test hook: query and key share one projection

  /// convweight requires sketch_level = gap; channels >= 1.
  void validate() const;
  bool uses_sketch_encoder() const { return design != Design::concat; }
  bool uses_attention() const { return design == Design::cross_kv || design == Design::cross_q; }
};

/// Attention weights, rows = query positions, columns = key positions,
/// normalized along `axis` (1: each row sums to 1).
template <typename T>
struct AttentionMap {
  Var<T> weights;
  int axis = 1;
};

template <typename T>
struct FusionResult {
  Var<T> fused;   // C x N
  Var<T> scores;  // pre-softmax logits, P x R
  AttentionMap<T> attention;
};

/// Query/key/value 1x1 projections for one feature level. With `tied`, the
/// key projection is the query projection.
template <typename T>
struct CrossProjections {
  Conv<T> q, k, v;
  bool tied = false;

  CrossProjections() = default;
  /// query_channels feed q; source_channels feed k and v.
  CrossProjections(int query_channels, int source_channels, int channels, bool tied, std::mt19937_64& rng);
  const Conv<T>& key() const { return tied ? q : k; }
  void collect(ParameterList<T>& out, const std::string& name);
};

/// Frame level as Query, sketch level as Key/Value:
/// W = softmax_rows(Q_f^T K_s / sqrt(C)), O = (V_s W^T) * Q_f, O is C x HW.
template <typename T>
FusionResult<T> cross_kv(const Var<T>& frame_level, const Var<T>& sketch_level, const CrossProjections<T>& proj);

/// Sketch level as Query, frame level as Key/Value:
/// W = softmax_rows(Q_s^T K_f / sqrt(C)), O = (V_f W^T) * Q_s, O is C x MN.
template <typename T>
FusionResult<T> cross_q(const Var<T>& frame_level, const Var<T>& sketch_level, const CrossProjections<T>& proj);

/// Applies the design at one level and returns the fused map as C x h x w.
/// Cross-KV lands on the frame grid; Cross-Q on the sketch grid, except that a
/// 1x1 (GAP) sketch output is broadcast over the frame grid.
template <typename T>
Var<T> fuse_level(Design design, const Var<T>& frame_level, const Var<T>& sketch_level,
                  const CrossProjections<T>& proj);

/// Per-level attention at L4 and L5, each resized to the L4 frame grid, summed.
/// Throws ConfigError for designs without attention.
template <typename T>
Var<T> fuse_multi_level(Design design, const VisualFeatures<T>& frame, const Var<T>& sketch_level,
                        const CrossProjections<T>& proj_l4, const CrossProjections<T>& proj_l5);

/// Weights of the segmentation head: 3x3 conv (C_dec -> 16), ReLU, 1x1 conv (16 -> 1).
template <typename T>
struct HeadWeights {
  Var<T> w1, b1, w2, b2;
};

inline constexpr int kHeadHidden = 16;
inline constexpr int kHyperHidden = 128;

/// Number of scalars in a seg head over C_dec input channels.
int head_parameter_count(int decoder_channels);

/// Two-layer perceptron from a GAP sketch embedding to a full seg head.
template <typename T>
struct HyperNet {
  Linear<T> l1, l2;
  Tensor<T> out_scale;  // fixed per-output scale, Kaiming-sized for the generated weights
  int decoder_channels = 0;

  HyperNet() = default;
  HyperNet(int embed_dim, int decoder_channels, std::mt19937_64& rng);
  /// gap: C5 x 1 x 1 (or C5 x 1).
  HeadWeights<T> operator()(const Var<T>& gap) const;
  void collect(ParameterList<T>& out, const std::string& name);
};

/// Splits a flat head parameter vector into HeadWeights (w1, b1, w2, b2 order).
template <typename T>
HeadWeights<T> unpack_head(const Var<T>& flat, int decoder_channels);

}  // namespace sketchvos::model
