#include "sketchvos/model/fusion.hpp"

#include <array>
#include <cmath>

namespace sketchvos::model {

using namespace numerics;

namespace {

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, n] : table) {
    if (v == value) return n;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E parse_of(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table, const char* what) {
  std::string valid;
  for (const auto& [v, n] : table) {
    if (n == s) return v;
    valid += (valid.empty() ? "" : ", ") + std::string(n);
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "' (expected one of " + valid + ")");
}

constexpr std::array<std::pair<Design, std::string_view>, 4> kDesigns{{{Design::concat, "concat"},
                                                                        {Design::convweight, "convweight"},
                                                                        {Design::cross_kv, "cross_kv"},
                                                                        {Design::cross_q, "cross_q"}}};
constexpr std::array<std::pair<SketchLevel, std::string_view>, 3> kSketchLevels{
    {{SketchLevel::l4, "L4"}, {SketchLevel::l5, "L5"}, {SketchLevel::gap, "gap"}}};
constexpr std::array<std::pair<VisualLevels, std::string_view>, 3> kVisualLevels{
    {{VisualLevels::l4, "L4"}, {VisualLevels::l5, "L5"}, {VisualLevels::multi, "multi"}}};

template <typename T>
Var<T> to_grid(const Var<T>& o, int h, int w) {
  return reshape(o, {o.dim(0), h, w});
}

}  // namespace

std::string_view to_string(Design d) { return name_of(d, kDesigns); }
std::string_view to_string(SketchLevel l) { return name_of(l, kSketchLevels); }
std::string_view to_string(VisualLevels l) { return name_of(l, kVisualLevels); }
Design parse_design(std::string_view s) { return parse_of(s, kDesigns, "design"); }
SketchLevel parse_sketch_level(std::string_view s) { return parse_of(s, kSketchLevels, "sketch_level"); }
VisualLevels parse_visual_levels(std::string_view s) { return parse_of(s, kVisualLevels, "visual_levels"); }

void FusionConfig::validate() const {
  if (channels < 1) throw ConfigError("fusion channels must be >= 1");
  if (design == Design::convweight && sketch_level != SketchLevel::gap) {
    throw ConfigError("convweight design requires sketch_level = gap");
  }
}

template <typename T>
CrossProjections<T>::CrossProjections(int query_channels, int source_channels, int channels, bool tied_,
                                      std::mt19937_64& rng)
    : q(query_channels, channels, 1, 1, rng), v(source_channels, channels, 1, 1, rng), tied(tied_) {
  if (tied) {
    if (query_channels != source_channels) {
      throw ConfigError("tied projections need equal query and source channel counts");
    }
  } else {
    k = Conv<T>(source_channels, channels, 1, 1, rng);
  }
}

template <typename T>
void CrossProjections<T>::collect(ParameterList<T>& out, const std::string& name) {
  q.collect(out, name + ".q");
  // Untied key bias shifts every logit in a row equally; the row softmax cancels it.
  if (!tied) out.push_back({name + ".k.w", &k.w});
  v.collect(out, name + ".v");
}

template <typename T>
FusionResult<T> cross_kv(const Var<T>& frame_level, const Var<T>& sketch_level, const CrossProjections<T>& proj) {
  const Var<T> q = project(frame_level, proj.q);
  const Var<T> k = project(sketch_level, proj.key());
  const Var<T> v = project(sketch_level, proj.v);
  Var<T> scores = scaled_dot_scores(q, k);
  Var<T> w = softmax(scores, 1);
  Var<T> fused = mul(matmul(v, transpose(w)), q);
  return {fused, scores, {w, 1}};
}

template <typename T>
FusionResult<T> cross_q(const Var<T>& frame_level, const Var<T>& sketch_level, const CrossProjections<T>& proj) {
  const Var<T> q = project(sketch_level, proj.q);
  const Var<T> k = project(frame_level, proj.key());
  const Var<T> v = project(frame_level, proj.v);
  Var<T> scores = scaled_dot_scores(q, k);
  Var<T> w = softmax(scores, 1);
  Var<T> fused = mul(matmul(v, transpose(w)), q);
  return {fused, scores, {w, 1}};
}

template <typename T>
Var<T> fuse_level(Design design, const Var<T>& frame_level, const Var<T>& sketch_level,
                  const CrossProjections<T>& proj) {
  if (design == Design::cross_kv) {
    return to_grid(cross_kv(frame_level, sketch_level, proj).fused, frame_level.dim(1), frame_level.dim(2));
  }
  if (design == Design::cross_q) {
    const Var<T> o = cross_q(frame_level, sketch_level, proj).fused;
    if (sketch_level.dim(1) * sketch_level.dim(2) == 1) {
      return broadcast_spatial(o, frame_level.dim(1), frame_level.dim(2));
    }
    return to_grid(o, sketch_level.dim(1), sketch_level.dim(2));
  }
  throw ConfigError("fuse_level: design " + std::string(to_string(design)) + " has no attention");
}

template <typename T>
Var<T> fuse_multi_level(Design design, const VisualFeatures<T>& frame, const Var<T>& sketch_level,
                        const CrossProjections<T>& proj_l4, const CrossProjections<T>& proj_l5) {
  if (design != Design::cross_kv && design != Design::cross_q) {
    throw ConfigError("multi-level fusion requires cross_kv or cross_q");
  }
  const int h = frame.l4.dim(1), w = frame.l4.dim(2);
  const Var<T> o4 = bilinear_resize(fuse_level(design, frame.l4, sketch_level, proj_l4), h, w);
  const Var<T> o5 = bilinear_resize(fuse_level(design, frame.l5, sketch_level, proj_l5), h, w);
  return add(o4, o5);
}

int head_parameter_count(int decoder_channels) {
  return kHeadHidden * decoder_channels * 9 + kHeadHidden + kHeadHidden + 1;
}

template <typename T>
HeadWeights<T> unpack_head(const Var<T>& flat, int c) {
  if (flat.value().size() != static_cast<std::size_t>(head_parameter_count(c))) {
    throw ShapeError("unpack_head: expected " + std::to_string(head_parameter_count(c)) + " values, got " +
                     std::to_string(flat.value().size()));
  }
  std::size_t off = 0;
  auto take = [&](Shape s) {
    Var<T> v = slice_flat(flat, off, s);
    off += shape_numel(s);
    return v;
  };
  HeadWeights<T> h;
  h.w1 = take({kHeadHidden, c, 3, 3});
  h.b1 = take({kHeadHidden});
  h.w2 = take({1, kHeadHidden, 1, 1});
  h.b2 = take({1});
  return h;
}

template <typename T>
HyperNet<T>::HyperNet(int embed_dim, int c, std::mt19937_64& rng)
    : l1(embed_dim, kHyperHidden, std::sqrt(2.0 / embed_dim), rng),
      l2(kHyperHidden, head_parameter_count(c), std::sqrt(1.0 / kHyperHidden), rng),
      out_scale({head_parameter_count(c), 1}),
      decoder_channels(c) {
  const std::size_t n_w1 = static_cast<std::size_t>(kHeadHidden) * c * 9;
  for (std::size_t i = 0; i < out_scale.size(); ++i) {
    T s = T(0.1);
    if (i < n_w1) s = static_cast<T>(std::sqrt(2.0 / (c * 9)));
    else if (i >= n_w1 + kHeadHidden && i < n_w1 + 2 * kHeadHidden) s = static_cast<T>(std::sqrt(1.0 / kHeadHidden));
    out_scale[i] = s;
  }
}

template <typename T>
HeadWeights<T> HyperNet<T>::operator()(const Var<T>& gap) const {
  const Var<T> x = reshape(gap, {static_cast<int>(gap.value().size()), 1});
  const Var<T> raw = l2(relu(l1(x)));
  return unpack_head(mul(raw, Var<T>(out_scale)), decoder_channels);
}

template <typename T>
void HyperNet<T>::collect(ParameterList<T>& out, const std::string& name) {
  l1.collect(out, name + ".l1");
  l2.collect(out, name + ".l2");
}

#define SKETCHVOS_INSTANTIATE_FUSION(T)                                                                       \
  template struct CrossProjections<T>;                                                                        \
  template struct HyperNet<T>;                                                                                \
  template FusionResult<T> cross_kv<T>(const Var<T>&, const Var<T>&, const CrossProjections<T>&);             \
  template FusionResult<T> cross_q<T>(const Var<T>&, const Var<T>&, const CrossProjections<T>&);              \
  template Var<T> fuse_level<T>(Design, const Var<T>&, const Var<T>&, const CrossProjections<T>&);            \
  template Var<T> fuse_multi_level<T>(Design, const VisualFeatures<T>&, const Var<T>&,                        \
                                      const CrossProjections<T>&, const CrossProjections<T>&);                \
  template HeadWeights<T> unpack_head<T>(const Var<T>&, int);

SKETCHVOS_INSTANTIATE_FUSION(float)
SKETCHVOS_INSTANTIATE_FUSION(double)

}  // namespace sketchvos::model
