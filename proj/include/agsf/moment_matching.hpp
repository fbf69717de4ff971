#pragma once

#include <optional>

#include "agsf/gaussian.hpp"
#include "agsf/transform.hpp"

namespace agsf {

enum class MomentMethod { Linear, Unscented };

// Sigma-point scaling parameters. kappa defaults to max(0, 3 - d),
// which keeps d + lambda positive for every dimension; beta = 2 is the
// Gaussian-optimal choice.
struct UnscentedConfig {
  double alpha = 1.0;
  double beta = 2.0;
  std::optional<double> kappa;

  double resolved_kappa(int d) const {
    return kappa ? *kappa : std::max(0.0, 3.0 - d);
  }
  double lambda(int d) const {
    return alpha * alpha * (d + resolved_kappa(d)) - d;
  }
};

struct SigmaPointSet {
  Eigen::MatrixXd points;       // d x (2d+1), column 0 is the mean
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd cov_weights;
};

SigmaPointSet sigma_points(const Gaussian& prior, const UnscentedConfig& cfg);

// First-order joint approximation: linearizes the map at the prior mean.
JointGaussian linear_moments(const Gaussian& prior, const Transform& t);

// Sigma-point joint approximation; the x-marginal block is the prior
// exactly, not its sigma-point reconstruction.
JointGaussian unscented_moments(const Gaussian& prior, const Transform& t,
                                const UnscentedConfig& cfg);

JointGaussian joint_moments(const Gaussian& prior, const Transform& t,
                            MomentMethod method, const UnscentedConfig& cfg);

// Kalman-style update on a matched joint; returns the conditioned
// Gaussian and the log marginal likelihood of y.
ConditionResult kalman_condition(const JointGaussian& joint,
                                 const Eigen::VectorXd& y);

}  // namespace agsf
