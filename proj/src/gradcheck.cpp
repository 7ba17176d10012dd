#include "mvgt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

GradCheckResult finite_difference_check(const ParamList& params, const std::function<double()>& loss, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference_check: step must be positive");
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& theta = params[p]->value;
    const Tensor& analytic = params[p]->grad;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + h;
      const double plus = loss();
      theta[i] = saved - h;
      const double minus = loss();
      theta[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("finite_difference_check: loss is not finite");
      }
      const double fd = (plus - minus) / (2.0 * h);
      const double err = std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
      if (err > result.max_rel_error || result.checked == 0) {
        result.max_rel_error = std::max(result.max_rel_error, err);
        result.worst_param = p;
        result.worst_index = i;
      }
      ++result.checked;
    }
  }
  return result;
}

}  // namespace mvgt
