#pragma once

#include <Eigen/Core>
#include <vector>

#include "agsf/rng.hpp"

namespace agsf {

// Effective sample size 1/sum(w^2) of a normalized weight vector.
double effective_sample_size(const Eigen::VectorXd& weights);

// count i.i.d. categorical draws; one uniform consumed per draw.
std::vector<int> multinomial_resample(const Eigen::VectorXd& weights,
                                      int count, RngStream& rng);

// Low-variance stratified sweep; consumes a single uniform.
std::vector<int> systematic_resample(const Eigen::VectorXd& weights,
                                     int count, RngStream& rng);

}  // namespace agsf
