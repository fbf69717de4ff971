#include "agsf/transform.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

namespace {
inline double fd_step(double xi) { return 1e-5 * (1.0 + std::abs(xi)); }
}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const VectorFn& map,
                                           const Eigen::VectorXd& x,
                                           int out_dim) {
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd jac(out_dim, d);
  Eigen::VectorXd xp = x, xm = x;
  for (int i = 0; i < d; ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    jac.col(i) = (map(xp) - map(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return jac;
}

std::vector<Eigen::MatrixXd> finite_difference_hessians(const MatrixFn& jac,
                                                        const Eigen::VectorXd& x,
                                                        int out_dim) {
  const int d = static_cast<int>(x.size());
  std::vector<Eigen::MatrixXd> hess(out_dim, Eigen::MatrixXd::Zero(d, d));
  Eigen::VectorXd xp = x, xm = x;
  for (int k = 0; k < d; ++k) {
    const double h = fd_step(x[k]);
    xp[k] = x[k] + h;
    xm[k] = x[k] - h;
    const Eigen::MatrixXd dj = (jac(xp) - jac(xm)) / (2.0 * h);
    for (int i = 0; i < out_dim; ++i) {
      hess[i].col(k) = dj.row(i).transpose();
    }
    xp[k] = x[k];
    xm[k] = x[k];
  }
  for (auto& h : hess) h = 0.5 * (h + h.transpose());
  return hess;
}

Eigen::MatrixXd Transform::jacobian_at(const Eigen::VectorXd& x) const {
  if (jacobian) return jacobian(x);
  if (!map) throw ModelError("transform has no map");
  return finite_difference_jacobian(map, x, out_dim);
}

std::vector<Eigen::MatrixXd> Transform::hessians_at(
    const Eigen::VectorXd& x) const {
  if (hessians) return hessians(x);
  if (jacobian) return finite_difference_hessians(jacobian, x, out_dim);
  MatrixFn fd_jac = [this](const Eigen::VectorXd& p) {
    return finite_difference_jacobian(map, p, out_dim);
  };
  return finite_difference_hessians(fd_jac, x, out_dim);
}

Eigen::MatrixXd Transform::noise_cov_at(const Eigen::VectorXd& x) const {
  if (!noise_cov) return Eigen::MatrixXd::Zero(out_dim, out_dim);
  return noise_cov(x);
}

Eigen::VectorXd Transform::noise_mean_or_zero() const {
  if (noise_mean.size() == 0) return Eigen::VectorXd::Zero(out_dim);
  return noise_mean;
}

Transform make_transform(int in_dim, int out_dim, VectorFn map,
                         Eigen::MatrixXd noise_cov) {
  Transform t;
  t.in_dim = in_dim;
  t.out_dim = out_dim;
  t.map = std::move(map);
  t.noise_cov = [cov = std::move(noise_cov)](const Eigen::VectorXd&) {
    return cov;
  };
  return t;
}

Transform make_affine_transform(const Eigen::MatrixXd& a,
                                const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& noise_cov) {
  Transform t;
  t.in_dim = static_cast<int>(a.cols());
  t.out_dim = static_cast<int>(a.rows());
  t.map = [a, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return a * x + b;
  };
  t.jacobian = [a](const Eigen::VectorXd&) { return a; };
  t.hessians = [din = t.in_dim, dout = t.out_dim](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>(dout,
                                        Eigen::MatrixXd::Zero(din, din));
  };
  t.noise_cov = [noise_cov](const Eigen::VectorXd&) { return noise_cov; };
  return t;
}

}  // namespace agsf
