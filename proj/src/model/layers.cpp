#include "sketchvos/model/layers.hpp"

#include <cmath>

namespace sketchvos::model {

template <typename T>
Conv<T>::Conv(int in_channels, int out_channels, int kernel, int stride_, std::mt19937_64& rng)
    : stride(stride_), pad(kernel / 2) {
  if (in_channels < 1 || out_channels < 1 || kernel < 1) throw ConfigError("conv dimensions must be >= 1");
  Tensor<T> weights({out_channels, in_channels, kernel, kernel});
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in_channels * kernel * kernel)));
  for (auto& v : weights.values()) v = static_cast<T>(dist(rng));
  w = Parameter<T>(std::move(weights));
  b = Parameter<T>(Tensor<T>({out_channels}));
}

template <typename T>
void Conv<T>::collect(ParameterList<T>& out, const std::string& name) {
  out.push_back({name + ".w", &w});
  out.push_back({name + ".b", &b});
}

template <typename T>
Linear<T>::Linear(int in_features, int out_features, double init_std, std::mt19937_64& rng) {
  Tensor<T> weights({out_features, in_features});
  std::normal_distribution<double> dist(0.0, init_std);
  for (auto& v : weights.values()) v = static_cast<T>(dist(rng));
  w = Parameter<T>(std::move(weights));
  b = Parameter<T>(Tensor<T>({out_features, 1}));
}

template <typename T>
void Linear<T>::collect(ParameterList<T>& out, const std::string& name) {
  out.push_back({name + ".w", &w});
  out.push_back({name + ".b", &b});
}

template <typename T>
Tensor<T> image_tensor(const RgbImage& img) {
  const int h = img.height(), w = img.width();
  Tensor<T> t({3, h, w});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* p = img.px(y, x);
      for (int c = 0; c < 3; ++c) t.at(c, y, x) = static_cast<T>((p[c] / 255.0 - 0.5) / 0.25);
    }
  }
  return t;
}

template <typename T>
Tensor<T> mask_tensor(const Mask& m) {
  Tensor<T> t({1, m.height(), m.width()});
  for (std::size_t i = 0; i < m.size(); ++i) t[i] = m.data()[i] ? T(1) : T(0);
  return t;
}

template <typename T>
Mask threshold(const Tensor<T>& prob, int height, int width) {
  if (prob.size() != static_cast<std::size_t>(height) * width) throw ShapeError("threshold: size mismatch");
  Mask m(height, width);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = prob[i] >= T(0.5) ? 1 : 0;
  return m;
}

#define SKETCHVOS_INSTANTIATE_LAYERS(T)                       \
  template struct Conv<T>;                                    \
  template struct Linear<T>;                                  \
  template Tensor<T> image_tensor<T>(const RgbImage&);        \
  template Tensor<T> mask_tensor<T>(const Mask&);             \
  template Mask threshold<T>(const Tensor<T>&, int, int);

SKETCHVOS_INSTANTIATE_LAYERS(float)
SKETCHVOS_INSTANTIATE_LAYERS(double)

}  // namespace sketchvos::model
