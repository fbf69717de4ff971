#include "agsf/filters.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "agsf/errors.hpp"
#include "agsf/resampling.hpp"

namespace agsf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

// Observation log likelihood under the conditionally Gaussian law.
double observation_log_likelihood(const Transform& obs,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
  return log_pdf(Gaussian{obs.apply(x) + obs.noise_mean_or_zero(),
                          obs.noise_cov_at(x)},
                 y);
}

std::vector<int> resample_indices(ResampleScheme scheme,
                                  const Eigen::VectorXd& weights, int count,
                                  RngStream& rng) {
  return scheme == ResampleScheme::Multinomial
             ? multinomial_resample(weights, count, rng)
             : systematic_resample(weights, count, rng);
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::EKF: return "EKF";
    case Algorithm::UKF: return "UKF";
    case Algorithm::LGSF: return "L-GSF";
    case Algorithm::UGSF: return "U-GSF";
    case Algorithm::BPF: return "BPF";
    case Algorithm::APF: return "APF";
    case Algorithm::LAGSF: return "L-AGSF";
    case Algorithm::UAGSF: return "U-AGSF";
  }
  throw ConfigError("unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "EKF" || name == "ekf") return Algorithm::EKF;
  if (name == "UKF" || name == "ukf") return Algorithm::UKF;
  if (name == "L-GSF" || name == "l-gsf") return Algorithm::LGSF;
  if (name == "U-GSF" || name == "u-gsf") return Algorithm::UGSF;
  if (name == "BPF" || name == "bpf") return Algorithm::BPF;
  if (name == "APF" || name == "apf") return Algorithm::APF;
  if (name == "L-AGSF" || name == "l-agsf") return Algorithm::LAGSF;
  if (name == "U-AGSF" || name == "u-agsf") return Algorithm::UAGSF;
  throw ConfigError("unknown algorithm name: " + name);
}

bool is_particle_filter(Algorithm a) {
  return a == Algorithm::BPF || a == Algorithm::APF;
}

bool is_agsf(Algorithm a) {
  return a == Algorithm::LAGSF || a == Algorithm::UAGSF;
}

MomentMethod moment_method_of(Algorithm a) {
  switch (a) {
    case Algorithm::EKF:
    case Algorithm::LGSF:
    case Algorithm::LAGSF:
      return MomentMethod::Linear;
    case Algorithm::UKF:
    case Algorithm::UGSF:
    case Algorithm::UAGSF:
      return MomentMethod::Unscented;
    default:
      return MomentMethod::Linear;  // particle filters never moment-match
  }
}

std::string FilterConfig::label() const { return algorithm_name(algorithm); }

std::string FilterConfig::params() const {
  std::string out = "M=" + std::to_string(num_components);
  if (is_agsf(algorithm)) {
    out += " N=" + std::to_string(predict_splits);
    out += " L=" + std::to_string(update_splits);
  }
  return out;
}

void FilterConfig::validate() const {
  if (num_components < 1) throw ConfigError("M must be at least 1");
  if (predict_splits < 1 || update_splits < 1) {
    throw ConfigError("split counts must be at least 1");
  }
  if (!(ess_threshold > 0.0) || ess_threshold > 1.0) {
    throw ConfigError("ess_threshold must lie in (0, 1]");
  }
  if ((algorithm == Algorithm::EKF || algorithm == Algorithm::UKF) &&
      num_components != 1) {
    throw ConfigError("EKF/UKF run with a single component");
  }
}

FilterStepOutput gaussian_filter_step(const Gaussian& belief,
                                      const StateSpaceModel& model, int t,
                                      const Eigen::VectorXd& y,
                                      MomentMethod method,
                                      const UnscentedConfig& ucfg) {
  const JointGaussian pred_joint =
      joint_moments(belief, model.dynamics(t), method, ucfg);
  const Gaussian predictive = pred_joint.marginal_y();
  const JointGaussian obs_joint =
      joint_moments(predictive, model.observation(t), method, ucfg);
  const ConditionResult cr = kalman_condition(obs_joint, y);

  FilterStepOutput out;
  out.predictive.weights = Eigen::VectorXd::Ones(1);
  out.predictive.components = {predictive};
  out.posterior.weights = Eigen::VectorXd::Ones(1);
  out.posterior.components = {cr.posterior};
  out.diagnostics.ess = 1.0;
  return out;
}

FilterStepOutput gsf_step(const GaussianMixture& belief,
                          const StateSpaceModel& model, int t,
                          const Eigen::VectorXd& y, MomentMethod method,
                          const UnscentedConfig& ucfg) {
  const int k = belief.size();
  FilterStepOutput out;
  out.predictive.weights = belief.weights;
  out.posterior.components.reserve(k);
  out.predictive.components.reserve(k);
  Eigen::VectorXd log_w(k);

  for (int m = 0; m < k; ++m) {
    const JointGaussian pred_joint =
        joint_moments(belief.components[m], model.dynamics(t), method, ucfg);
    const Gaussian predictive = pred_joint.marginal_y();
    const JointGaussian obs_joint =
        joint_moments(predictive, model.observation(t), method, ucfg);
    const ConditionResult cr = kalman_condition(obs_joint, y);
    out.predictive.components.push_back(predictive);
    out.posterior.components.push_back(cr.posterior);
    log_w[m] = safe_log(belief.weights[m]) + cr.log_evidence;
  }
  try {
    out.posterior.weights = normalize_log_weights(log_w);
  } catch (const WeightUnderflowError&) {
    out.posterior.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    out.diagnostics.degenerate_update = true;
  }
  out.diagnostics.ess = effective_sample_size(out.posterior.weights);
  return out;
}

StepResult bpf_step(const GaussianMixture& particles,
                    const StateSpaceModel& model, int t,
                    const Eigen::VectorXd& y, const FilterConfig& cfg,
                    RngStream& rng) {
  const int m = particles.size();
  const Transform dyn = model.dynamics(t);
  const Transform obs = model.observation(t);

  // Transition mixture doubles as the predictive density and as the
  // proposal each particle is propagated from.
  GaussianMixture predictive;
  predictive.weights = particles.weights;
  predictive.components.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd& x = particles.components[i].mean;
    predictive.components.push_back(Gaussian{
        dyn.apply(x) + dyn.noise_mean_or_zero(), dyn.noise_cov_at(x)});
  }

  std::vector<Eigen::VectorXd> moved(m);
  for (int i = 0; i < m; ++i) {
    moved[i] = sample_one(predictive.components[i], rng);
  }

  Eigen::VectorXd log_w(m);
  for (int i = 0; i < m; ++i) {
    log_w[i] = safe_log(particles.weights[i]) +
               observation_log_likelihood(obs, moved[i], y);
  }

  StepResult result;
  result.output.predictive = predictive;
  GaussianMixture& posterior = result.output.posterior;
  posterior.components.reserve(m);
  const Eigen::MatrixXd zero =
      Eigen::MatrixXd::Zero(model.state_dim, model.state_dim);
  for (int i = 0; i < m; ++i) {
    posterior.components.push_back(Gaussian{moved[i], zero});
  }

  bool recovered = false;
  try {
    posterior.weights = normalize_log_weights(log_w);
  } catch (const WeightUnderflowError&) {
    // Rebuild the ensemble from the pre-update weights and continue.
    result.output.diagnostics.degenerate_update = true;
    const std::vector<int> idx =
        resample_indices(cfg.pf_resampling, particles.weights, m, rng);
    GaussianMixture fresh;
    fresh.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
    fresh.components.reserve(m);
    for (int i : idx) fresh.components.push_back(posterior.components[i]);
    posterior = fresh;
    recovered = true;
  }
  result.output.diagnostics.ess = effective_sample_size(posterior.weights);

  if (!recovered && (cfg.pf_always_resample ||
                     result.output.diagnostics.ess <
                         cfg.ess_threshold * static_cast<double>(m))) {
    const std::vector<int> idx =
        resample_indices(cfg.pf_resampling, posterior.weights, m, rng);
    GaussianMixture carried;
    carried.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
    carried.components.reserve(m);
    for (int i : idx) carried.components.push_back(posterior.components[i]);
    result.next_belief = carried;
  } else {
    result.next_belief = posterior;
  }
  return result;
}

StepResult apf_step(const GaussianMixture& particles,
                    const StateSpaceModel& model, int t,
                    const Eigen::VectorXd& y, const FilterConfig& cfg,
                    RngStream& rng) {
  const int m = particles.size();
  const Transform dyn = model.dynamics(t);
  const Transform obs = model.observation(t);

  GaussianMixture predictive;
  predictive.weights = particles.weights;
  predictive.components.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd& x = particles.components[i].mean;
    predictive.components.push_back(Gaussian{
        dyn.apply(x) + dyn.noise_mean_or_zero(), dyn.noise_cov_at(x)});
  }

  StepResult result;
  result.output.predictive = predictive;

  // First stage: score each particle by the likelihood at its predicted
  // mean, then select parents with those scores.
  Eigen::VectorXd first_stage(m);
  for (int i = 0; i < m; ++i) {
    first_stage[i] =
        observation_log_likelihood(obs, predictive.components[i].mean, y);
  }
  Eigen::VectorXd selection;
  bool aux_active = true;
  try {
    selection = normalize_log_weights(first_stage);
  } catch (const WeightUnderflowError&) {
    result.output.diagnostics.degenerate_update = true;
    selection = particles.weights;
    aux_active = false;
  }
  const std::vector<int> parents =
      resample_indices(cfg.pf_resampling, selection, m, rng);

  GaussianMixture& posterior = result.output.posterior;
  posterior.components.reserve(m);
  const Eigen::MatrixXd zero =
      Eigen::MatrixXd::Zero(model.state_dim, model.state_dim);
  Eigen::VectorXd log_w(m);
  for (int j = 0; j < m; ++j) {
    const int p = parents[j];
    const Eigen::VectorXd moved =
        sample_one(predictive.components[p], rng);
    posterior.components.push_back(Gaussian{moved, zero});
    log_w[j] = safe_log(particles.weights[p]) +
               observation_log_likelihood(obs, moved, y) -
               (aux_active ? first_stage[p] : 0.0);
  }
  try {
    posterior.weights = normalize_log_weights(log_w);
  } catch (const WeightUnderflowError&) {
    result.output.diagnostics.degenerate_update = true;
    posterior.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  }
  result.output.diagnostics.ess = effective_sample_size(posterior.weights);
  result.next_belief = posterior;
  return result;
}

AgsfPrediction agsf_predict(const GaussianMixture& belief,
                            const StateSpaceModel& model, int t,
                            const FilterConfig& cfg, RngStream& rng) {
  const Transform dyn = model.dynamics(t);
  const MomentMethod method = moment_method_of(cfg.algorithm);
  const int n = cfg.predict_splits;

  AgsfPrediction pred;
  pred.predictive.components.reserve(belief.size() * n);
  std::vector<double> weights;
  weights.reserve(belief.size() * n);

  for (int m = 0; m < belief.size(); ++m) {
    const Gaussian& comp = belief.components[m];
    const ResolvedDelta rd =
        resolve_delta(cfg.predict_policy, comp.cov, dyn, comp.mean, n);
    if (cfg.predict_policy.kind ==
        AugmentationPolicy::Kind::AdaptiveProportional) {
      pred.adaptive_rho.push_back(rd.rho);
    }
    const auto joints =
        augmented_joint(comp, dyn, rd.delta, n, method, cfg.unscented, rng);
    for (const auto& [wj, joint] : joints) {
      weights.push_back(belief.weights[m] * wj);
      pred.predictive.components.push_back(joint.marginal_y());
    }
  }
  pred.predictive.weights =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
  return pred;
}

FilterStepOutput agsf_update(const AgsfPrediction& prediction,
                             const StateSpaceModel& model, int t,
                             const Eigen::VectorXd& y, const FilterConfig& cfg,
                             RngStream& rng) {
  const Transform obs = model.observation(t);
  const MomentMethod method = moment_method_of(cfg.algorithm);
  const int l = cfg.update_splits;
  const GaussianMixture& pred = prediction.predictive;

  FilterStepOutput out;
  out.predictive = pred;
  out.diagnostics.adaptive_rho_predict = prediction.adaptive_rho;
  out.posterior.components.reserve(pred.size() * l);
  std::vector<double> log_w;
  log_w.reserve(pred.size() * l);

  for (int mn = 0; mn < pred.size(); ++mn) {
    const Gaussian& comp = pred.components[mn];
    const ResolvedDelta rd =
        resolve_delta(cfg.update_policy, comp.cov, obs, comp.mean, l);
    if (cfg.update_policy.kind ==
        AugmentationPolicy::Kind::AdaptiveProportional) {
      out.diagnostics.adaptive_rho.push_back(rd.rho);
    }
    const auto joints =
        augmented_joint(comp, obs, rd.delta, l, method, cfg.unscented, rng);
    const double log_base = safe_log(pred.weights[mn] / l);
    for (const auto& [wj, joint] : joints) {
      (void)wj;
      const ConditionResult cr = kalman_condition(joint, y);
      out.posterior.components.push_back(cr.posterior);
      log_w.push_back(log_base + cr.log_evidence);
    }
  }
  const Eigen::VectorXd log_w_vec =
      Eigen::Map<const Eigen::VectorXd>(log_w.data(), log_w.size());
  try {
    out.posterior.weights = normalize_log_weights(log_w_vec);
  } catch (const WeightUnderflowError&) {
    out.posterior.weights = Eigen::VectorXd::Constant(
        log_w_vec.size(), 1.0 / static_cast<double>(log_w_vec.size()));
    out.diagnostics.degenerate_update = true;
  }
  out.diagnostics.ess = effective_sample_size(out.posterior.weights);
  return out;
}

GaussianMixture agsf_resample(const GaussianMixture& posterior, int m,
                              RngStream& rng) {
  const std::vector<int> idx =
      multinomial_resample(posterior.weights, m, rng);
  GaussianMixture out;
  out.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  out.components.reserve(m);
  for (int i : idx) out.components.push_back(posterior.components[i]);
  return out;
}

GaussianMixture initialize_mixture(const StateSpaceModel& model,
                                   const FilterConfig& cfg, RngStream& rng) {
  const Gaussian& prior = model.initial_belief;
  const int m = cfg.num_components;
  switch (cfg.algorithm) {
    case Algorithm::EKF:
    case Algorithm::UKF: {
      GaussianMixture out;
      out.weights = Eigen::VectorXd::Ones(1);
      out.components = {prior};
      return out;
    }
    case Algorithm::BPF:
    case Algorithm::APF:
      return augment_split(
          prior, Eigen::MatrixXd::Zero(prior.dim(), prior.dim()), m, rng);
    default: {
      if (cfg.init_policy.kind ==
          AugmentationPolicy::Kind::AdaptiveProportional) {
        throw ConfigError("init policy must be fixed or proportional");
      }
      const Transform none;  // fixed/proportional resolutions ignore it
      const ResolvedDelta rd =
          resolve_delta(cfg.init_policy, prior.cov, none, prior.mean, m);
      return augment_split(prior, rd.delta, m, rng);
    }
  }
}

void run_filter_each(const StateSpaceModel& model, const Trajectory& traj,
                     const FilterConfig& cfg, std::uint64_t seed,
                     const StepCallback& on_step) {
  cfg.validate();
  traj.validate();
  if (!traj.observations.empty() &&
      traj.observations[0].size() != model.obs_dim) {
    throw ConfigError("trajectory observation dimension does not match model");
  }

  RngStream rng(seed);
  GaussianMixture belief = initialize_mixture(model, cfg, rng);

  for (int t = 1; t <= traj.length(); ++t) {
    const Eigen::VectorXd& y = traj.observations[t - 1];
    try {
      FilterStepOutput out;
      switch (cfg.algorithm) {
        case Algorithm::EKF:
        case Algorithm::UKF:
        case Algorithm::LGSF:
        case Algorithm::UGSF: {
          out = gsf_step(belief, model, t, y, moment_method_of(cfg.algorithm),
                         cfg.unscented);
          belief = out.posterior;
          break;
        }
        case Algorithm::BPF: {
          StepResult r = bpf_step(belief, model, t, y, cfg, rng);
          belief = std::move(r.next_belief);
          out = std::move(r.output);
          break;
        }
        case Algorithm::APF: {
          StepResult r = apf_step(belief, model, t, y, cfg, rng);
          belief = std::move(r.next_belief);
          out = std::move(r.output);
          break;
        }
        case Algorithm::LAGSF:
        case Algorithm::UAGSF: {
          AgsfPrediction pred = agsf_predict(belief, model, t, cfg, rng);
          out = agsf_update(pred, model, t, y, cfg, rng);
          belief = cfg.agsf_resample
                       ? agsf_resample(out.posterior, cfg.num_components, rng)
                       : out.posterior;
          break;
        }
      }
      out.predictive.validate();
      out.posterior.validate();
      on_step(t, out);
    } catch (const AgsfError& e) {
      throw FilterRunError(t, e.what());
    }
  }
}

std::vector<FilterStepOutput> run_filter(const StateSpaceModel& model,
                                         const Trajectory& traj,
                                         const FilterConfig& cfg,
                                         std::uint64_t seed) {
  std::vector<FilterStepOutput> outputs;
  outputs.reserve(traj.length());
  run_filter_each(model, traj, cfg, seed,
                  [&outputs](int, const FilterStepOutput& out) {
                    outputs.push_back(out);
                  });
  return outputs;
}

void write_step_diagnostics_jsonl(std::ostream& out,
                                  const std::string& algorithm, int t,
                                  const FilterStepOutput& step) {
  const Gaussian summary = mixture_moments(step.posterior);
  nlohmann::json rec;
  rec["t"] = t;
  rec["algorithm"] = algorithm;
  rec["ess"] = step.diagnostics.ess;
  rec["rho"] = step.diagnostics.adaptive_rho;
  rec["rho_predict"] = step.diagnostics.adaptive_rho_predict;
  rec["degenerate_update"] = step.diagnostics.degenerate_update;
  rec["posterior_mean"] =
      std::vector<double>(summary.mean.begin(), summary.mean.end());
  rec["posterior_cov_trace"] = summary.cov.trace();
  out << rec.dump() << '\n';
}

}  // namespace agsf
