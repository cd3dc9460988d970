#pragma once

#include <random>
#include <string>

#include "sketchvos/image.hpp"
#include "sketchvos/numerics/ops.hpp"
#include "sketchvos/numerics/parameter.hpp"

namespace sketchvos::model {

using numerics::NamedParameter;
using numerics::Parameter;
using numerics::ParameterList;
using numerics::Shape;
using numerics::Tensor;
using numerics::Var;

/// Square-kernel convolution with bias. Weights are Kaiming-normal over
/// fan-in, biases start at zero.
template <typename T>
struct Conv {
  Parameter<T> w;
  Parameter<T> b;
  int stride = 1;
  int pad = 0;

  Conv() = default;
  Conv(int in_channels, int out_channels, int kernel, int stride, std::mt19937_64& rng);

  int in_channels() const { return w.shape()[1]; }
  int out_channels() const { return w.shape()[0]; }
  Var<T> operator()(const Var<T>& x) const { return numerics::conv2d(x, w.var, b.var, stride, pad); }
  void collect(ParameterList<T>& out, const std::string& name);
};

/// y = W x + b on column vectors (in x 1 -> out x 1).
template <typename T>
struct Linear {
  Parameter<T> w;
  Parameter<T> b;

  Linear() = default;
  Linear(int in_features, int out_features, double init_std, std::mt19937_64& rng);

  Var<T> operator()(const Var<T>& x) const {
    return numerics::add(numerics::matmul(w.var, x), b.var);
  }
  void collect(ParameterList<T>& out, const std::string& name);
};

/// RGB frame as a 3 x H x W tensor, each channel mapped by (v / 255 - 0.5) / 0.25.
template <typename T>
Tensor<T> image_tensor(const RgbImage& img);

/// Binary raster as a 1 x H x W tensor of {0, 1}.
template <typename T>
Tensor<T> mask_tensor(const Mask& m);

/// Thresholds an H x W (or 1 x H x W) probability map at 0.5.
template <typename T>
Mask threshold(const Tensor<T>& prob, int height, int width);

}  // namespace sketchvos::model
