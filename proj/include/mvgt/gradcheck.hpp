#pragma once

#include <functional>

#include "mvgt/mlp.hpp"

namespace mvgt {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Compares the gradients currently stored in `params` against central
/// differences (f(theta + h e_i) - f(theta - h e_i)) / 2h of `loss`.
/// The error per entry is |fd - analytic| / max(1, |analytic|).
/// Throws NumericError when `loss` returns a non-finite value.
GradCheckResult finite_difference_check(const ParamList& params, const std::function<double()>& loss,
                                        double h = 1e-6);

}  // namespace mvgt
