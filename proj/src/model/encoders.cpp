#include "sketchvos/model/encoders.hpp"

namespace sketchvos::model {

using namespace numerics;

void EncoderConfig::validate() const {
  if (widths.size() != 4) throw ConfigError("encoder widths must list exactly 4 stages");
  for (int w : widths) {
    if (w < 1) throw ConfigError("encoder widths must be >= 1");
  }
  if (key_dim < 1 || value_dim < 1) throw ConfigError("encoder dims must be >= 1");
  if (key_dim > widths.back()) throw ConfigError("key_dim must not exceed the last encoder width");
}

void require_divisible_by_16(int height, int width, const char* what) {
  if (height < 16 || width < 16 || height % 16 || width % 16) {
    throw ShapeError(std::string(what) + ": input " + std::to_string(height) + "x" + std::to_string(width) +
                     " is not a multiple of 16");
  }
}

template <typename T>
StageEncoder<T>::StageEncoder(int in_channels, const std::vector<int>& widths, std::mt19937_64& rng) {
  int c = in_channels;
  for (int w : widths) {
    convs.emplace_back(c, w, 3, 2, rng);
    convs.emplace_back(w, w, 3, 1, rng);
    c = w;
  }
}

template <typename T>
std::vector<Var<T>> StageEncoder<T>::forward(const Var<T>& x) const {
  std::vector<Var<T>> outs;
  Var<T> h = x;
  for (std::size_t i = 0; i < convs.size(); i += 2) {
    h = relu(convs[i](h));
    h = relu(convs[i + 1](h));
    outs.push_back(h);
  }
  return outs;
}

template <typename T>
void StageEncoder<T>::collect(ParameterList<T>& out, const std::string& name) {
  for (std::size_t i = 0; i < convs.size(); ++i) {
    convs[i].collect(out, name + ".s" + std::to_string(i / 2 + 1) + ".c" + std::to_string(i % 2 + 1));
  }
}

template <typename T>
FrameEncoder<T>::FrameEncoder(const EncoderConfig& cfg, std::mt19937_64& rng)
    : stages(3, cfg.widths, rng), key_head(cfg.l5_channels(), cfg.key_dim, 1, 1, rng) {}

template <typename T>
VisualFeatures<T> FrameEncoder<T>::operator()(const Var<T>& image) const {
  if (image.value().rank() != 3 || image.dim(0) != 3) throw ShapeError("encode_frame: expected 3 x H x W");
  require_divisible_by_16(image.dim(1), image.dim(2), "encode_frame");
  auto outs = stages.forward(image);
  return {outs[1], outs[2], outs[3], key_head(outs[3])};
}

template <typename T>
void FrameEncoder<T>::collect(ParameterList<T>& out, const std::string& name) {
  stages.collect(out, name);
  key_head.collect(out, name + ".key");
}

template <typename T>
ValueEncoder<T>::ValueEncoder(const EncoderConfig& cfg, std::mt19937_64& rng)
    : stages(4, cfg.widths, rng), head(cfg.l5_channels(), cfg.value_dim, 1, 1, rng) {}

template <typename T>
Var<T> ValueEncoder<T>::operator()(const Var<T>& image, const Var<T>& aux) const {
  if (image.value().rank() != 3 || image.dim(0) != 3) throw ShapeError("encode_value: expected 3 x H x W frame");
  Var<T> a = aux.value().rank() == 2 ? reshape(aux, {1, aux.dim(0), aux.dim(1)}) : aux;
  if (a.value().rank() != 3 || a.dim(0) != 1 || a.dim(1) != image.dim(1) || a.dim(2) != image.dim(2)) {
    throw ShapeError("encode_value: aux " + shape_str(aux.shape()) + " does not match frame " +
                     shape_str(image.shape()));
  }
  require_divisible_by_16(image.dim(1), image.dim(2), "encode_value");
  return head(stages.forward(concat_channels(std::vector<Var<T>>{image, a})).back());
}

template <typename T>
void ValueEncoder<T>::collect(ParameterList<T>& out, const std::string& name) {
  stages.collect(out, name);
  head.collect(out, name + ".head");
}

template <typename T>
SketchEncoder<T>::SketchEncoder(const EncoderConfig& cfg, std::mt19937_64& rng) : stages(1, cfg.widths, rng) {}

template <typename T>
SketchFeatures<T> SketchEncoder<T>::operator()(const Var<T>& raster) const {
  Var<T> r = raster.value().rank() == 2 ? reshape(raster, {1, raster.dim(0), raster.dim(1)}) : raster;
  if (r.value().rank() != 3 || r.dim(0) != 1) throw ShapeError("encode_sketch: expected 1 x H x W raster");
  require_divisible_by_16(r.dim(1), r.dim(2), "encode_sketch");
  auto outs = stages.forward(r);
  return {outs[2], outs[3], global_avg_pool(outs[3])};
}

template <typename T>
void SketchEncoder<T>::collect(ParameterList<T>& out, const std::string& name) {
  stages.collect(out, name);
}

template <typename T>
Var<T> project(const Var<T>& feature, const Conv<T>& projection) {
  Var<T> y = projection(feature);
  return reshape(y, {y.dim(0), y.dim(1) * y.dim(2)});
}

#define SKETCHVOS_INSTANTIATE_ENCODERS(T)  \
  template struct StageEncoder<T>;         \
  template struct FrameEncoder<T>;         \
  template struct ValueEncoder<T>;         \
  template struct SketchEncoder<T>;        \
  template Var<T> project<T>(const Var<T>&, const Conv<T>&);

SKETCHVOS_INSTANTIATE_ENCODERS(float)
SKETCHVOS_INSTANTIATE_ENCODERS(double)

}  // namespace sketchvos::model
