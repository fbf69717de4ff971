#pragma once

#include <vector>

#include "agsf/gaussian.hpp"

namespace agsf {

// Time-averaged squared Euclidean error of the point estimates.
double mse(const std::vector<Eigen::VectorXd>& estimates,
           const std::vector<Eigen::VectorXd>& truth);

struct LpeResult {
  double value = 0.0;
  int floored_steps = 0;  // steps clamped at the log-density floor
};

// Time-averaged negative log density of the true state under each
// predictive mixture. Per-step log densities are floored at -745 (the
// smallest double-representable exponent) so a single collapsed step
// cannot produce a non-finite metric.
LpeResult lpe(const std::vector<GaussianMixture>& predictives,
              const std::vector<Eigen::VectorXd>& truth);

inline constexpr double kLogDensityFloor = -745.0;

}  // namespace agsf
