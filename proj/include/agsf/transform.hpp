#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace agsf {

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using HessianFn =
    std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)>;

// Central finite differences with step 1e-5 * (1 + |x_i|) per coordinate.
Eigen::MatrixXd finite_difference_jacobian(const VectorFn& map,
                                           const Eigen::VectorXd& x,
                                           int out_dim);

// Hessians of each output coordinate, via differences of the Jacobian;
// each result is symmetrized.
std::vector<Eigen::MatrixXd> finite_difference_hessians(const MatrixFn& jac,
                                                        const Eigen::VectorXd& x,
                                                        int out_dim);

// A conditionally Gaussian map y = f(x) + r with E[r] = noise_mean and
// Cov[r] = noise_cov(x*) evaluated at the linearization point. Jacobian
// and Hessians fall back to finite differences of the map when absent.
struct Transform {
  int in_dim = 0;
  int out_dim = 0;
  VectorFn map;
  MatrixFn jacobian;        // optional
  HessianFn hessians;       // optional
  MatrixFn noise_cov;
  Eigen::VectorXd noise_mean;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return map(x); }
  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& x) const;
  std::vector<Eigen::MatrixXd> hessians_at(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd noise_cov_at(const Eigen::VectorXd& x) const;
  Eigen::VectorXd noise_mean_or_zero() const;
};

Transform make_transform(int in_dim, int out_dim, VectorFn map,
                         Eigen::MatrixXd noise_cov);

// y = A x + b + r; Jacobian is constant and all Hessians vanish exactly.
Transform make_affine_transform(const Eigen::MatrixXd& a,
                                const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& noise_cov);

}  // namespace agsf
