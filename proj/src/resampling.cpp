#include "agsf/resampling.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

namespace {

Eigen::VectorXd checked_cumsum(const Eigen::VectorXd& weights) {
  if (weights.size() == 0 || weights.minCoeff() < 0.0 ||
      !(weights.sum() > 0.0)) {
    throw DegenerateWeightsError("weights carry no positive mass");
  }
  Eigen::VectorXd cum(weights.size());
  double acc = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  return cum;
}

int locate(const Eigen::VectorXd& cum, double target) {
  int lo = 0, hi = static_cast<int>(cum.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cum[mid] < target)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

double effective_sample_size(const Eigen::VectorXd& weights) {
  const double sq = weights.squaredNorm();
  if (!(sq > 0.0)) throw DegenerateWeightsError("zero weights in ESS");
  return 1.0 / sq;
}

std::vector<int> multinomial_resample(const Eigen::VectorXd& weights,
                                      int count, RngStream& rng) {
  const Eigen::VectorXd cum = checked_cumsum(weights);
  const double total = cum[cum.size() - 1];
  std::vector<int> idx(count);
  for (int j = 0; j < count; ++j) {
    idx[j] = locate(cum, rng.uniform() * total);
  }
  return idx;
}

std::vector<int> systematic_resample(const Eigen::VectorXd& weights,
                                     int count, RngStream& rng) {
  const Eigen::VectorXd cum = checked_cumsum(weights);
  const double total = cum[cum.size() - 1];
  const double start = rng.uniform() / count;
  std::vector<int> idx(count);
  int k = 0;
  for (int j = 0; j < count; ++j) {
    const double target = (start + static_cast<double>(j) / count) * total;
    while (k < cum.size() - 1 && cum[k] < target) ++k;
    idx[j] = k;
  }
  return idx;
}

}  // namespace agsf
