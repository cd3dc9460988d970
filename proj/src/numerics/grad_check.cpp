#include "sketchvos/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sketchvos::numerics {

double GradCheckReport::max_rel_error() const {
  double m = 0;
  for (const auto& p : params) m = std::max(m, p.max_rel_error);
  return m;
}

namespace {

double eval_scalar(const std::function<Var<double>()>& f) {
  NoGradGuard guard;
  Var<double> out = f();
  if (out.value().size() != 1) throw ShapeError("grad_check: function must return a scalar");
  return out.value()[0];
}

}  // namespace

GradCheckReport grad_check(const std::function<Var<double>()>& f, const ParameterList<double>& params,
                           const GradCheckOptions& options) {
  const double base = eval_scalar(f);
  if (!std::isfinite(base)) throw CheckInvalidError("grad_check: function value is not finite");
  if (eval_scalar(f) != base) throw CheckInvalidError("grad_check: function is not deterministic");

  for (const auto& np : params) np.param->zero_grad();
  {
    Var<double> out = f();
    out.backward();
  }

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  for (const auto& np : params) {
    Parameter<double>& p = *np.param;
    const Tensor<double> analytic = p.gradient();
    std::vector<std::size_t> idx(p.value().size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (idx.size() > options.max_entries_per_param) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(options.max_entries_per_param);
    }
    ParamGradError err{np.name, 0.0, idx.size()};
    for (std::size_t i : idx) {
      double& slot = p.mutable_value()[i];
      const double saved = slot;
      slot = saved + options.eps;
      const double plus = eval_scalar(f);
      slot = saved - options.eps;
      const double minus = eval_scalar(f);
      slot = saved;
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double a = analytic[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      err.max_rel_error = std::max(err.max_rel_error, rel);
    }
    report.params.push_back(err);
  }
  for (const auto& np : params) np.param->zero_grad();
  return report;
}

}  // namespace sketchvos::numerics
