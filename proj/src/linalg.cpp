#include "agsf/linalg.hpp"

#include <cmath>
#include <limits>

#include "agsf/errors.hpp"

namespace agsf {

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd Cholesky::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd x = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(x);
}

namespace {

// A usable factor must have strictly positive, finite pivots; Eigen's
// LLT can report success on semidefinite input while producing zeros.
bool usable_llt(const Eigen::LLT<Eigen::MatrixXd>& llt, int d) {
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l = llt.matrixL();
  for (int i = 0; i < d; ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return false;
  }
  return true;
}

}  // namespace

Cholesky jittered_cholesky(const Eigen::MatrixXd& s) {
  const int d = static_cast<int>(s.rows());
  const Eigen::MatrixXd sym = symmetrize(s);
  const double scale = sym.trace() / std::max(d, 1);

  double jitter = 0.0;
  for (int level = 0; level <= 7; ++level) {
    Eigen::MatrixXd candidate = sym;
    if (level > 0) {
      jitter = 1e-12 * std::pow(10.0, level - 1) * scale;
      candidate.diagonal().array() += jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(candidate);
    if (usable_llt(llt, d)) {
      Cholesky out;
      out.lower = llt.matrixL();
      out.half_log_det = out.lower.diagonal().array().log().sum();
      out.jitter = jitter;
      return out;
    }
  }
  throw SingularCovarianceError(
      "covariance not positive definite after jitter escalation (trace " +
      std::to_string(sym.trace()) + ")");
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  const int d = static_cast<int>(s.rows());
  const Eigen::MatrixXd sym = symmetrize(s);

  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (usable_llt(llt, d)) return llt.matrixL();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd eigs = es.eigenvalues();
  if (eigs.minCoeff() < kPsdEigTol) {
    throw IndefiniteCovarianceError("matrix has eigenvalue " +
                                    std::to_string(eigs.minCoeff()) +
                                    " below PSD tolerance");
  }
  const Eigen::VectorXd roots = eigs.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() *
         es.eigenvectors().transpose();
}

double log_sum_exp(const Eigen::VectorXd& log_values) {
  if (log_values.size() == 0)
    return -std::numeric_limits<double>::infinity();
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < log_values.size(); ++i) {
    if (log_values[i] > m) m = log_values[i];
  }
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (int i = 0; i < log_values.size(); ++i) {
    acc += std::exp(log_values[i] - m);
  }
  return m + std::log(acc);
}

Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_weights) {
  const double lse = log_sum_exp(log_weights);
  if (!std::isfinite(lse)) {
    throw WeightUnderflowError("all log weights underflowed");
  }
  Eigen::VectorXd w(log_weights.size());
  for (int i = 0; i < log_weights.size(); ++i) {
    w[i] = std::exp(log_weights[i] - lse);
  }
  // kill the exponent-subtraction roundoff left by very large log values
  w /= w.sum();
  return w;
}

}  // namespace agsf
