#include "agsf/metrics.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

double mse(const std::vector<Eigen::VectorXd>& estimates,
           const std::vector<Eigen::VectorXd>& truth) {
  if (estimates.size() != truth.size()) {
    throw ModelError("mse: estimate/truth length mismatch");
  }
  if (estimates.empty()) throw ModelError("mse: empty sequences");
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    acc += (estimates[t] - truth[t]).squaredNorm();
  }
  return acc / static_cast<double>(truth.size());
}

LpeResult lpe(const std::vector<GaussianMixture>& predictives,
              const std::vector<Eigen::VectorXd>& truth) {
  if (predictives.size() != truth.size()) {
    throw ModelError("lpe: predictive/truth length mismatch");
  }
  if (predictives.empty()) throw ModelError("lpe: empty sequences");
  LpeResult out;
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    double log_p = mixture_log_pdf(predictives[t], truth[t]);
    if (!(log_p >= kLogDensityFloor)) {  // also catches NaN and -inf
      log_p = kLogDensityFloor;
      ++out.floored_steps;
    }
    acc -= log_p;
  }
  out.value = acc / static_cast<double>(truth.size());
  return out;
}

}  // namespace agsf
