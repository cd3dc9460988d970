#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchvos/numerics/autograd.hpp"

namespace sketchvos::numerics {

/// Learned tensor: a gradient-tracking leaf plus Adam state.
template <typename T>
struct Parameter {
  Parameter() = default;
  explicit Parameter(Tensor<T> init)
      : var(std::move(init), /*requires_grad=*/true),
        first_moment(var.shape()),
        second_moment(var.shape()) {}

  Var<T> var;
  Tensor<T> first_moment;
  Tensor<T> second_moment;
  std::int64_t step = 0;

  const Tensor<T>& value() const { return var.value(); }
  Tensor<T>& mutable_value() { return var.mutable_value(); }
  const Shape& shape() const { return var.shape(); }

  /// Gradient with the value's shape; zeros when nothing has flowed yet.
  Tensor<T> gradient() const {
    const auto& g = var.grad();
    return g.shape() == var.shape() ? g : Tensor<T>(var.shape());
  }
  void zero_grad() { var.zero_grad(); }
};

/// Ordered, named view over the parameters of a model.
template <typename T>
struct NamedParameter {
  std::string name;
  Parameter<T>* param;
};

template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update on every parameter. Throws ConfigError if
/// lr <= 0. Gradients are left in place; callers clear them.
template <typename T>
void adam_step(const ParameterList<T>& params, const AdamConfig& config);

}  // namespace sketchvos::numerics
