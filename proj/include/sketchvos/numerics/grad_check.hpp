#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sketchvos/numerics/parameter.hpp"

namespace sketchvos::numerics {

struct GradCheckOptions {
  double eps = 1e-5;
  // Entries probed per parameter; every entry when the tensor is smaller.
  std::size_t max_entries_per_param = 24;
  std::uint64_t seed = 0;
};

struct ParamGradError {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t probed = 0;
};

struct GradCheckReport {
  std::vector<ParamGradError> params;
  double max_rel_error() const;
  bool passed(double tolerance) const { return max_rel_error() < tolerance; }
};

/// Compares reverse-mode gradients of the scalar `f` against central
/// differences (f(x+eps) - f(x-eps)) / 2eps. Relative error per entry is
/// |a - n| / max(|a|, |n|, 1e-8). Throws CheckInvalidError if two evaluations
/// at the same point disagree.
GradCheckReport grad_check(const std::function<Var<double>()>& f, const ParameterList<double>& params,
                           const GradCheckOptions& options = {});

}  // namespace sketchvos::numerics
