#pragma once

#include <utility>
#include <vector>

#include "agsf/gaussian.hpp"
#include "agsf/moment_matching.hpp"
#include "agsf/transform.hpp"

namespace agsf {

// Rule producing the augmentation covariance each time it is resolved
// against a concrete component. Proportional(1) reproduces the parent
// Gaussian (Gaussian-filter behavior), Proportional(0) degenerates to
// particles, and AdaptiveProportional picks rho from the closed-form
// bias/variance minimizer.
struct AugmentationPolicy {
  enum class Kind { Fixed, Proportional, AdaptiveProportional };

  Kind kind = Kind::Proportional;
  Eigen::MatrixXd fixed_delta;
  double rho = 1.0;
  int sample_count_hint = 1;

  static AugmentationPolicy fixed(Eigen::MatrixXd delta);
  static AugmentationPolicy proportional(double rho);
  static AugmentationPolicy adaptive(int sample_count_hint = 1);
};

struct SplitSpec {
  AugmentationPolicy policy;
  int n_splits = 1;
};

// Closed-form minimizer of the proportional bias/variance objective:
//   rho* = (2/n) tr(Sigma J'J) / sum_i tr(Sigma H_i)^2, clamped to [0,1].
// A vanishing denominator (affine map) selects rho* = 1. The derivation
// covers the linearized split-mean estimator; for unscented splits the
// same formula is applied on empirical grounds only.
double rho_star(const Eigen::MatrixXd& sigma, const Transform& t,
                const Eigen::VectorXd& mu, int n);

struct ResolvedDelta {
  Eigen::MatrixXd delta;
  // rho of a proportional-form resolution; negative when not applicable.
  double rho = -1.0;
};

ResolvedDelta resolve_delta(const AugmentationPolicy& policy,
                            const Eigen::MatrixXd& sigma, const Transform& t,
                            const Eigen::VectorXd& mu, int n);

// Predicted mean-squared error of the split-mean estimator:
//   (1/n) tr((Sigma - Delta) J'J) + (1/4) sum_i tr(Delta H_i)^2.
double mse_objective(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& sigma,
                     const Transform& t, const Eigen::VectorXd& mu, int n);

// Splits N(mu, Sigma) into n equally weighted components N(z_j, Delta)
// with z_j drawn from N(mu, Sigma - Delta). Delta = Sigma reproduces the
// input without consuming randomness; Delta = 0 yields particles.
GaussianMixture augment_split(const Gaussian& g, const Eigen::MatrixXd& delta,
                              int n, RngStream& rng);

// Split-then-moment-match: the joint approximation behind both AGSF steps.
std::vector<std::pair<double, JointGaussian>> augmented_joint(
    const Gaussian& g, const Transform& t, const Eigen::MatrixXd& delta, int n,
    MomentMethod method, const UnscentedConfig& cfg, RngStream& rng);

void check_split_constraints(const Eigen::MatrixXd& delta,
                             const Eigen::MatrixXd& sigma);

}  // namespace agsf
