#include "agsf/augmentation.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

AugmentationPolicy AugmentationPolicy::fixed(Eigen::MatrixXd delta) {
  AugmentationPolicy p;
  p.kind = Kind::Fixed;
  p.fixed_delta = std::move(delta);
  return p;
}

AugmentationPolicy AugmentationPolicy::proportional(double rho) {
  if (rho < 0.0 || rho > 1.0) {
    throw ConfigError("proportional rho must lie in [0, 1]");
  }
  AugmentationPolicy p;
  p.kind = Kind::Proportional;
  p.rho = rho;
  return p;
}

AugmentationPolicy AugmentationPolicy::adaptive(int sample_count_hint) {
  AugmentationPolicy p;
  p.kind = Kind::AdaptiveProportional;
  p.sample_count_hint = sample_count_hint;
  return p;
}

void check_split_constraints(const Eigen::MatrixXd& delta,
                             const Eigen::MatrixXd& sigma) {
  if (delta.rows() != sigma.rows() || delta.cols() != sigma.cols()) {
    throw ConstraintViolationError("delta/sigma shape mismatch");
  }
  if (min_eigenvalue(delta) < kPsdEigTol) {
    throw ConstraintViolationError("delta has eigenvalue below -1e-9");
  }
  if (max_eigenvalue(delta - sigma) > -kPsdEigTol) {
    throw ConstraintViolationError("delta exceeds sigma (eigenvalue above 1e-9)");
  }
}

double rho_star(const Eigen::MatrixXd& sigma, const Transform& t,
                const Eigen::VectorXd& mu, int n) {
  const Eigen::MatrixXd jac = t.jacobian_at(mu);
  const double num = (sigma * jac.transpose() * jac).trace();
  const std::vector<Eigen::MatrixXd> hess = t.hessians_at(mu);
  double den = 0.0;
  for (const Eigen::MatrixXd& h : hess) {
    const double tr = (sigma * h).trace();
    den += tr * tr;
  }
  if (den == 0.0) return 1.0;  // linearization is exact
  const double rho = (2.0 / n) * num / den;
  return std::min(std::max(rho, 0.0), 1.0);
}

ResolvedDelta resolve_delta(const AugmentationPolicy& policy,
                            const Eigen::MatrixXd& sigma, const Transform& t,
                            const Eigen::VectorXd& mu, int n) {
  ResolvedDelta out;
  switch (policy.kind) {
    case AugmentationPolicy::Kind::Fixed:
      check_split_constraints(policy.fixed_delta, sigma);
      out.delta = policy.fixed_delta;
      return out;
    case AugmentationPolicy::Kind::Proportional:
      if (policy.rho < 0.0 || policy.rho > 1.0) {
        throw ConstraintViolationError("proportional rho outside [0, 1]");
      }
      out.delta = policy.rho * sigma;
      out.rho = policy.rho;
      return out;
    case AugmentationPolicy::Kind::AdaptiveProportional: {
      const int count = n > 0 ? n : policy.sample_count_hint;
      out.rho = rho_star(sigma, t, mu, count);
      out.delta = out.rho * sigma;
      return out;
    }
  }
  throw ConfigError("unknown augmentation policy");
}

double mse_objective(const Eigen::MatrixXd& delta, const Eigen::MatrixXd& sigma,
                     const Transform& t, const Eigen::VectorXd& mu, int n) {
  check_split_constraints(delta, sigma);
  const Eigen::MatrixXd jac = t.jacobian_at(mu);
  const double variance_term =
      ((sigma - delta) * jac.transpose() * jac).trace() / n;
  const std::vector<Eigen::MatrixXd> hess = t.hessians_at(mu);
  double bias_term = 0.0;
  for (const Eigen::MatrixXd& h : hess) {
    const double tr = (delta * h).trace();
    bias_term += tr * tr;
  }
  return variance_term + 0.25 * bias_term;
}

GaussianMixture augment_split(const Gaussian& g, const Eigen::MatrixXd& delta,
                              int n, RngStream& rng) {
  if (n < 1) throw ConfigError("split count must be at least 1");
  check_split_constraints(delta, g.cov);
  const Gaussian center_law{g.mean, g.cov - delta};
  const std::vector<Eigen::VectorXd> centers = sample(center_law, rng, n);
  GaussianMixture out;
  out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  out.components.reserve(n);
  for (const Eigen::VectorXd& z : centers) {
    out.components.push_back(Gaussian{z, delta});
  }
  return out;
}

std::vector<std::pair<double, JointGaussian>> augmented_joint(
    const Gaussian& g, const Transform& t, const Eigen::MatrixXd& delta, int n,
    MomentMethod method, const UnscentedConfig& cfg, RngStream& rng) {
  const GaussianMixture split = augment_split(g, delta, n, rng);
  std::vector<std::pair<double, JointGaussian>> out;
  out.reserve(n);
  for (int j = 0; j < split.size(); ++j) {
    out.emplace_back(split.weights[j],
                     joint_moments(split.components[j], t, method, cfg));
  }
  return out;
}

}  // namespace agsf
