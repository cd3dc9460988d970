#include <cmath>

#include "sketchvos/numerics/parameter.hpp"

namespace sketchvos::numerics {

template <typename T>
void adam_step(const ParameterList<T>& params, const AdamConfig& config) {
  if (!(config.lr > 0)) throw ConfigError("adam: learning rate must be > 0");
  if (config.beta1 < 0 || config.beta1 >= 1 || config.beta2 < 0 || config.beta2 >= 1) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  for (const auto& np : params) {
    Parameter<T>& p = *np.param;
    ++p.step;
    const Tensor<T>& g = p.var.grad();
    const bool has_grad = g.shape() == p.shape();
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(p.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(p.step));
    auto& value = p.mutable_value();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double gi = has_grad ? static_cast<double>(g[i]) : 0.0;
      const double m = config.beta1 * p.first_moment[i] + (1.0 - config.beta1) * gi;
      const double v = config.beta2 * p.second_moment[i] + (1.0 - config.beta2) * gi * gi;
      p.first_moment[i] = static_cast<T>(m);
      p.second_moment[i] = static_cast<T>(v);
      const double update = config.lr * (m / bc1) / (std::sqrt(v / bc2) + config.eps);
      value[i] = static_cast<T>(value[i] - update);
    }
  }
}

template void adam_step(const ParameterList<float>&, const AdamConfig&);
template void adam_step(const ParameterList<double>&, const AdamConfig&);

}  // namespace sketchvos::numerics
