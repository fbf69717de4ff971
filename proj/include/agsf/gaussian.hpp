#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "agsf/linalg.hpp"
#include "agsf/rng.hpp"

namespace agsf {

// Covariance entries below this magnitude are treated as an exact zero
// matrix; sampling such a Gaussian returns the mean and leaves the rng
// untouched.
inline constexpr double kZeroCovTol = 1e-12;

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Gaussian() = default;
  Gaussian(Eigen::VectorXd m, Eigen::MatrixXd c)
      : mean(std::move(m)), cov(std::move(c)) {}

  int dim() const { return static_cast<int>(mean.size()); }
  bool zero_cov() const {
    return cov.size() == 0 || cov.cwiseAbs().maxCoeff() < kZeroCovTol;
  }

  // Enforces symmetry within 1e-10 and eigenvalues above -1e-9.
  void validate() const;
};

struct GaussianMixture {
  Eigen::VectorXd weights;
  std::vector<Gaussian> components;

  int size() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : components[0].dim(); }
  void validate() const;
};

// Joint Gaussian over a stacked pair (x, y), stored in block form.
struct JointGaussian {
  Eigen::VectorXd mean_x, mean_y;
  Eigen::MatrixXd cov_x;    // x marginal covariance
  Eigen::MatrixXd cov_xy;   // cross covariance, dx by dy
  Eigen::MatrixXd cov_y;    // y marginal covariance

  int dim_x() const { return static_cast<int>(mean_x.size()); }
  int dim_y() const { return static_cast<int>(mean_y.size()); }

  Gaussian marginal_x() const { return {mean_x, cov_x}; }
  Gaussian marginal_y() const { return {mean_y, cov_y}; }
  Gaussian stacked() const;
  void validate() const;
};

double log_pdf(const Gaussian& g, const Eigen::VectorXd& x);

// log N(x | mean, .) reusing an existing factorization of the covariance.
double log_pdf_with_cholesky(const Cholesky& chol, const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& x);

std::vector<Eigen::VectorXd> sample(const Gaussian& g, RngStream& rng, int n);
Eigen::VectorXd sample_one(const Gaussian& g, RngStream& rng);

double mixture_log_pdf(const GaussianMixture& m, const Eigen::VectorXd& x);

// Moment-matched single Gaussian (law of total covariance).
Gaussian mixture_moments(const GaussianMixture& m);

struct ConditionResult {
  Gaussian posterior;
  double log_evidence = 0.0;
};

// Gaussian conditioning x | y for one joint block; shared by every
// Kalman-style update in the library.
ConditionResult condition_joint(const JointGaussian& joint,
                                const Eigen::VectorXd& y);

// Conditional of a joint Gaussian mixture: per-component conditioning with
// weights reweighted by the component marginal likelihood of y.
GaussianMixture condition_mixture(
    const std::vector<std::pair<double, JointGaussian>>& joint,
    const Eigen::VectorXd& y);

}  // namespace agsf
