#include "agsf/gaussian.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kWeightSumTol = 1e-12;
}  // namespace

void Gaussian::validate() const {
  if (cov.rows() != dim() || cov.cols() != dim()) {
    throw ModelError("covariance shape does not match mean dimension");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw ModelError("gaussian has non-finite entries");
  }
  if (!is_symmetric(cov)) {
    throw ModelError("covariance is not symmetric within 1e-10");
  }
  if (!zero_cov() && min_eigenvalue(cov) < kPsdEigTol) {
    throw IndefiniteCovarianceError("covariance eigenvalue below -1e-9");
  }
}

void GaussianMixture::validate() const {
  if (weights.size() != size()) {
    throw ModelError("mixture weight/component count mismatch");
  }
  if (size() == 0) throw ModelError("empty mixture");
  if (weights.minCoeff() < 0.0) {
    throw ModelError("negative mixture weight");
  }
  if (std::abs(weights.sum() - 1.0) > kWeightSumTol) {
    throw ModelError("mixture weights do not sum to 1");
  }
  const int d = dim();
  for (const Gaussian& g : components) {
    if (g.dim() != d) throw ModelError("mixture components differ in dimension");
    g.validate();
  }
}

Gaussian JointGaussian::stacked() const {
  const int dx = dim_x(), dy = dim_y();
  Eigen::VectorXd mean(dx + dy);
  mean << mean_x, mean_y;
  Eigen::MatrixXd cov(dx + dy, dx + dy);
  cov.topLeftCorner(dx, dx) = cov_x;
  cov.topRightCorner(dx, dy) = cov_xy;
  cov.bottomLeftCorner(dy, dx) = cov_xy.transpose();
  cov.bottomRightCorner(dy, dy) = cov_y;
  return {mean, cov};
}

void JointGaussian::validate() const { stacked().validate(); }

double log_pdf_with_cholesky(const Cholesky& chol, const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& x) {
  const Eigen::VectorXd z = chol.solve_lower(x - mean);
  const double d = static_cast<double>(mean.size());
  return -0.5 * (d * kLog2Pi + z.squaredNorm()) - chol.half_log_det;
}

double log_pdf(const Gaussian& g, const Eigen::VectorXd& x) {
  if (x.size() != g.dim()) throw ModelError("log_pdf dimension mismatch");
  return log_pdf_with_cholesky(jittered_cholesky(g.cov), g.mean, x);
}

std::vector<Eigen::VectorXd> sample(const Gaussian& g, RngStream& rng, int n) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(n);
  if (g.zero_cov()) {
    for (int i = 0; i < n; ++i) out.push_back(g.mean);
    return out;
  }
  const Eigen::MatrixXd root = psd_sqrt(g.cov);
  for (int i = 0; i < n; ++i) {
    out.push_back(g.mean + root * rng.normals(g.dim()));
  }
  return out;
}

Eigen::VectorXd sample_one(const Gaussian& g, RngStream& rng) {
  return sample(g, rng, 1)[0];
}

double mixture_log_pdf(const GaussianMixture& m, const Eigen::VectorXd& x) {
  Eigen::VectorXd terms(m.size());
  for (int k = 0; k < m.size(); ++k) {
    terms[k] = m.weights[k] > 0.0
                   ? std::log(m.weights[k]) + log_pdf(m.components[k], x)
                   : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms);
}

Gaussian mixture_moments(const GaussianMixture& m) {
  const int d = m.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < m.size(); ++k) {
    mean += m.weights[k] * m.components[k].mean;
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < m.size(); ++k) {
    const Eigen::VectorXd dev = m.components[k].mean - mean;
    cov += m.weights[k] * (m.components[k].cov + dev * dev.transpose());
  }
  return {mean, symmetrize(cov)};
}

ConditionResult condition_joint(const JointGaussian& joint,
                                const Eigen::VectorXd& y) {
  const Cholesky chol = jittered_cholesky(joint.cov_y);
  // gain = C S^-1, computed through the factorization
  const Eigen::MatrixXd gain = chol.solve(joint.cov_xy.transpose()).transpose();
  ConditionResult out;
  out.posterior.mean = joint.mean_x + gain * (y - joint.mean_y);
  out.posterior.cov =
      symmetrize(joint.cov_x - gain * joint.cov_y * gain.transpose());
  out.log_evidence = log_pdf_with_cholesky(chol, joint.mean_y, y);
  return out;
}

GaussianMixture condition_mixture(
    const std::vector<std::pair<double, JointGaussian>>& joint,
    const Eigen::VectorXd& y) {
  const int k = static_cast<int>(joint.size());
  if (k == 0) throw ModelError("condition_mixture: empty joint list");
  GaussianMixture out;
  out.components.reserve(k);
  Eigen::VectorXd log_w(k);
  for (int i = 0; i < k; ++i) {
    const ConditionResult cr = condition_joint(joint[i].second, y);
    out.components.push_back(cr.posterior);
    log_w[i] = joint[i].first > 0.0
                   ? std::log(joint[i].first) + cr.log_evidence
                   : -std::numeric_limits<double>::infinity();
  }
  out.weights = normalize_log_weights(log_w);
  return out;
}

}  // namespace agsf
