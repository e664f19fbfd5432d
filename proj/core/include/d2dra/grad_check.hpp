#pragma once

#include <functional>
#include <string>
#include <vector>

#include "d2dra/optimizer.hpp"

namespace d2dra::nn {

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int n_params = 0;
  std::string worst_param;
};

// Compares analytic gradients against central finite differences, parameter
// element by parameter element. An element passes when
// |analytic - fd| <= max(tolerance * max(|analytic|, |fd|), abs_floor);
// the reported relative error uses denominator max(|a|, |fd|, abs_floor/tol)
// so pass <=> max_rel_error <= tolerance.
GradCheckReport grad_check(
    const ParamSet& params,
    const std::function<double(const ParamSet&)>& loss_value,
    const std::function<std::vector<Mat>(const ParamSet&)>& loss_gradients,
    double tolerance = 1e-4, double fd_step = 1e-5, double abs_floor = 1e-6);

}  // namespace d2dra::nn
