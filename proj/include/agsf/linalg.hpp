#pragma once

#include <Eigen/Dense>

namespace agsf {

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdEigTol = -1e-9;

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol = kSymmetryTol);

double min_eigenvalue(const Eigen::MatrixXd& m);
double max_eigenvalue(const Eigen::MatrixXd& m);

// Cholesky factor of a symmetric matrix with an escalating diagonal
// jitter: 1e-12 * tr(S)/d up through 1e-6 * tr(S)/d in decade steps.
// Throws SingularCovarianceError once the ladder is exhausted.
struct Cholesky {
  Eigen::MatrixXd lower;
  double half_log_det = 0.0;
  double jitter = 0.0;

  Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const {
    return lower.triangularView<Eigen::Lower>().solve(b);
  }
  // Full solve S x = b via the two triangular sweeps.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
};

Cholesky jittered_cholesky(const Eigen::MatrixXd& s);

// PSD square root: lower-triangular Cholesky when positive definite,
// otherwise the symmetric eigendecomposition root with negative
// eigenvalues above -1e-9 clipped to zero. Indefinite input throws.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s);

double log_sum_exp(const Eigen::VectorXd& log_values);

// exp-normalizes log weights; throws WeightUnderflowError when no entry
// carries finite mass.
Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_weights);

}  // namespace agsf
