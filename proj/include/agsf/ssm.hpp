#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "agsf/gaussian.hpp"
#include "agsf/transform.hpp"

namespace agsf {

// Behavioral contract for a (possibly time-varying) state-space model.
// dynamics(t) maps x_{t-1} to x_t and observation(t) maps x_t to y_t,
// both as conditionally Gaussian transforms.
struct StateSpaceModel {
  std::string name;
  int state_dim = 0;
  int obs_dim = 0;
  std::function<Transform(int)> dynamics;
  std::function<Transform(int)> observation;
  Gaussian initial_belief;

  // Optional rectangular noise factor for simulation; lets singular
  // process covariances be sampled through their generating factor.
  std::function<Eigen::MatrixXd(int)> process_noise_factor;

  // Known exogenous input u_t, when the model has one.
  std::function<double(int)> input;
};

struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> observations;
  std::vector<double> inputs;  // empty for autonomous models

  int length() const { return static_cast<int>(states.size()); }
  void validate() const;
};

Trajectory simulate(const StateSpaceModel& model, int horizon, RngStream& rng);

// Columnar text form: t, x1..xd, y1..yd, u.
void write_trajectory_csv(const Trajectory& traj,
                          const std::filesystem::path& path);
// One JSON record per line: {"t":..,"x":[..],"y":[..],"u":..}.
void write_trajectory_jsonl(const Trajectory& traj,
                            const std::filesystem::path& path);
Trajectory read_trajectory_jsonl(const std::filesystem::path& path);

}  // namespace agsf
