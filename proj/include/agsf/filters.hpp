#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agsf/augmentation.hpp"
#include "agsf/moment_matching.hpp"
#include "agsf/ssm.hpp"

namespace agsf {

enum class Algorithm { EKF, UKF, LGSF, UGSF, BPF, APF, LAGSF, UAGSF };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);
bool is_particle_filter(Algorithm a);
bool is_agsf(Algorithm a);
MomentMethod moment_method_of(Algorithm a);

enum class ResampleScheme { Multinomial, Systematic };

struct FilterConfig {
  Algorithm algorithm = Algorithm::EKF;
  int num_components = 1;  // M: mixture components or particles
  int predict_splits = 1;  // N per component (AGSF)
  int update_splits = 1;   // L per predictive component (AGSF)
  AugmentationPolicy predict_policy = AugmentationPolicy::proportional(1.0);
  AugmentationPolicy update_policy = AugmentationPolicy::proportional(1.0);
  // How the initial belief is split into the M starting components;
  // particle filters always use a pure particle split.
  AugmentationPolicy init_policy = AugmentationPolicy::proportional(0.5);
  double ess_threshold = 0.5;
  UnscentedConfig unscented;
  // Particle-filter resampling scheme and an override that bypasses the
  // ESS trigger (used when locking runs against the AGSF particle limit).
  ResampleScheme pf_resampling = ResampleScheme::Systematic;
  bool pf_always_resample = false;
  // The AGSF end-of-step resampling; disable to keep the raw weighted
  // posterior (its prediction/update match a GSF exactly in that limit).
  bool agsf_resample = true;

  std::string label() const;   // e.g. "L-AGSF"
  std::string params() const;  // e.g. "M=100 N=5 L=5"
  void validate() const;
};

struct StepDiagnostics {
  double ess = 0.0;
  std::vector<double> adaptive_rho;          // update-step resolved rho_2 per component
  std::vector<double> adaptive_rho_predict;  // prediction-step resolved rho_1
  bool degenerate_update = false;
};

struct FilterStepOutput {
  GaussianMixture predictive;  // p(x_t | y_{1:t-1}), emitted before y_t is used
  GaussianMixture posterior;   // p(x_t | y_{1:t}), before any resampling
  StepDiagnostics diagnostics;
};

// Step output plus the belief carried into the next step (after any
// resampling the algorithm performs).
struct StepResult {
  FilterStepOutput output;
  GaussianMixture next_belief;
};

FilterStepOutput gaussian_filter_step(const Gaussian& belief,
                                      const StateSpaceModel& model, int t,
                                      const Eigen::VectorXd& y,
                                      MomentMethod method,
                                      const UnscentedConfig& ucfg);

FilterStepOutput gsf_step(const GaussianMixture& belief,
                          const StateSpaceModel& model, int t,
                          const Eigen::VectorXd& y, MomentMethod method,
                          const UnscentedConfig& ucfg);

StepResult bpf_step(const GaussianMixture& particles,
                    const StateSpaceModel& model, int t,
                    const Eigen::VectorXd& y, const FilterConfig& cfg,
                    RngStream& rng);

StepResult apf_step(const GaussianMixture& particles,
                    const StateSpaceModel& model, int t,
                    const Eigen::VectorXd& y, const FilterConfig& cfg,
                    RngStream& rng);

struct AgsfPrediction {
  GaussianMixture predictive;        // M*N weighted components
  std::vector<double> adaptive_rho;  // prediction-step resolved rhos
};

AgsfPrediction agsf_predict(const GaussianMixture& belief,
                            const StateSpaceModel& model, int t,
                            const FilterConfig& cfg, RngStream& rng);

FilterStepOutput agsf_update(const AgsfPrediction& prediction,
                             const StateSpaceModel& model, int t,
                             const Eigen::VectorXd& y, const FilterConfig& cfg,
                             RngStream& rng);

GaussianMixture agsf_resample(const GaussianMixture& posterior, int m,
                              RngStream& rng);

GaussianMixture initialize_mixture(const StateSpaceModel& model,
                                   const FilterConfig& cfg, RngStream& rng);

// Runs the configured filter over the trajectory's observations,
// invoking the callback once per step so large runs need not hold every
// mixture in memory. A step-level failure aborts with the failing step
// index in the error.
using StepCallback = std::function<void(int, const FilterStepOutput&)>;
void run_filter_each(const StateSpaceModel& model, const Trajectory& traj,
                     const FilterConfig& cfg, std::uint64_t seed,
                     const StepCallback& on_step);

std::vector<FilterStepOutput> run_filter(const StateSpaceModel& model,
                                         const Trajectory& traj,
                                         const FilterConfig& cfg,
                                         std::uint64_t seed);

// One JSON record per step: t, algorithm, ess, rho values, flags,
// posterior mean and posterior covariance trace.
void write_step_diagnostics_jsonl(std::ostream& out,
                                  const std::string& algorithm, int t,
                                  const FilterStepOutput& step);

}  // namespace agsf
