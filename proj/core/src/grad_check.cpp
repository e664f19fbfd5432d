#include "d2dra/grad_check.hpp"

#include <cmath>

#include "d2dra/errors.hpp"

namespace d2dra::nn {

GradCheckReport grad_check(const ParamSet& params,
                           const std::function<double(const ParamSet&)>& loss_value,
                           const std::function<std::vector<Mat>(const ParamSet&)>& loss_gradients,
                           double tolerance, double fd_step, double abs_floor) {
  const std::vector<Mat> analytic = loss_gradients(params);
  if (analytic.size() != params.entries.size()) {
    throw ConfigError("grad_check: gradient count does not match parameter count");
  }

  GradCheckReport report;
  const double denom_floor = abs_floor / tolerance;
  ParamSet probe = params;
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    Mat& theta = probe.entries[k].value;
    for (Eigen::Index r = 0; r < theta.rows(); ++r) {
      for (Eigen::Index c = 0; c < theta.cols(); ++c) {
        const double saved = theta(r, c);
        theta(r, c) = saved + fd_step;
        const double up = loss_value(probe);
        theta(r, c) = saved - fd_step;
        const double down = loss_value(probe);
        theta(r, c) = saved;

        const double fd = (up - down) / (2.0 * fd_step);
        const double a = analytic[k](r, c);
        const double abs_err = std::abs(a - fd);
        const double rel = abs_err / std::max({std::abs(a), std::abs(fd), denom_floor});
        report.n_params += 1;
        report.max_abs_error = std::max(report.max_abs_error, abs_err);
        if (rel > report.max_rel_error) {
          report.max_rel_error = rel;
          report.worst_param = params.entries[k].name + "(" + std::to_string(r) + "," +
                               std::to_string(c) + ")";
        }
      }
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace d2dra::nn
