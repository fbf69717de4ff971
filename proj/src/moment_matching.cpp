#include "agsf/moment_matching.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

SigmaPointSet sigma_points(const Gaussian& prior, const UnscentedConfig& cfg) {
  const int d = prior.dim();
  const double lambda = cfg.lambda(d);
  if (!(d + lambda > 0.0)) {
    throw ConfigError("unscented config yields d + lambda <= 0");
  }
  const Eigen::MatrixXd root = psd_sqrt(prior.cov);
  const double spread = std::sqrt(d + lambda);

  SigmaPointSet set;
  set.points.resize(d, 2 * d + 1);
  set.points.col(0) = prior.mean;
  for (int i = 0; i < d; ++i) {
    set.points.col(1 + i) = prior.mean + spread * root.col(i);
    set.points.col(1 + d + i) = prior.mean - spread * root.col(i);
  }
  set.mean_weights.resize(2 * d + 1);
  set.cov_weights.resize(2 * d + 1);
  set.mean_weights[0] = lambda / (d + lambda);
  set.cov_weights[0] =
      lambda / (d + lambda) + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
  const double w = 1.0 / (2.0 * (d + lambda));
  for (int i = 1; i < 2 * d + 1; ++i) {
    set.mean_weights[i] = w;
    set.cov_weights[i] = w;
  }
  return set;
}

JointGaussian linear_moments(const Gaussian& prior, const Transform& t) {
  const Eigen::MatrixXd jac = t.jacobian_at(prior.mean);
  JointGaussian joint;
  joint.mean_x = prior.mean;
  joint.cov_x = prior.cov;
  joint.mean_y = t.apply(prior.mean) + t.noise_mean_or_zero();
  joint.cov_y = symmetrize(jac * prior.cov * jac.transpose() +
                           t.noise_cov_at(prior.mean));
  joint.cov_xy = prior.cov * jac.transpose();
  return joint;
}

JointGaussian unscented_moments(const Gaussian& prior, const Transform& t,
                                const UnscentedConfig& cfg) {
  const SigmaPointSet set = sigma_points(prior, cfg);
  const int n = static_cast<int>(set.points.cols());
  const int dy = t.out_dim;

  Eigen::MatrixXd mapped(dy, n);
  for (int i = 0; i < n; ++i) {
    mapped.col(i) = t.apply(set.points.col(i));
  }
  Eigen::VectorXd mu_f = Eigen::VectorXd::Zero(dy);
  for (int i = 0; i < n; ++i) {
    mu_f += set.mean_weights[i] * mapped.col(i);
  }
  Eigen::MatrixXd s = t.noise_cov_at(prior.mean);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(prior.dim(), dy);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd dev_y = mapped.col(i) - mu_f;
    s += set.cov_weights[i] * dev_y * dev_y.transpose();
    c += set.cov_weights[i] * (set.points.col(i) - prior.mean) *
         dev_y.transpose();
  }
  JointGaussian joint;
  joint.mean_x = prior.mean;
  joint.cov_x = prior.cov;
  joint.mean_y = mu_f + t.noise_mean_or_zero();
  joint.cov_y = symmetrize(s);
  joint.cov_xy = c;
  return joint;
}

JointGaussian joint_moments(const Gaussian& prior, const Transform& t,
                            MomentMethod method, const UnscentedConfig& cfg) {
  return method == MomentMethod::Linear ? linear_moments(prior, t)
                                        : unscented_moments(prior, t, cfg);
}

ConditionResult kalman_condition(const JointGaussian& joint,
                                 const Eigen::VectorXd& y) {
  return condition_joint(joint, y);
}

}  // namespace agsf
