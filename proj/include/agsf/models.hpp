#pragma once

#include "agsf/ssm.hpp"

namespace agsf {

// --- Maneuvering-target range-bearing tracking -------------------------
//
// Four-dimensional state (x1, v1, x2, v2): the target turns clockwise,
// runs straight, then turns the other way, with regime boundaries at
// 2T/5 and 3T/5. Observations are range and bearing from the origin.

struct TrackingModelConfig {
  double turn_acceleration = 0.5;     // a
  double obs_noise_var = 25e-3;       // sigma^2
  double dt = 1.0;
  int horizon = 200;                  // T, fixes the regime boundaries
  Eigen::Vector4d initial_state{100.0, 2.0, 100.0, 0.0};
  Eigen::Vector4d initial_cov_diag{1.0, 0.1, 1.0, 0.1};
  // Freeze the turn rate at its current value when linearizing instead
  // of differentiating through Omega(v).
  bool frozen_turn_rate_jacobian = false;
};

Eigen::Matrix4d cv_matrix(double dt);

// Constant-turn transition; |omega| below 1e-8 falls back to the
// zero-turn limit, which is exactly the constant-velocity matrix.
Eigen::Matrix4d ct_matrix(double omega, double dt);

// Signed turn rate +-a/speed; throws ModelError at zero speed.
double turn_rate(const Eigen::Vector4d& x, double accel, int sign);

// Regime-dependent one-step map F_t(x) x.
Eigen::Vector4d tracking_dynamics(const Eigen::Vector4d& x, int t,
                                  const TrackingModelConfig& cfg);

// (range, bearing) with the four-quadrant bearing in (-pi, pi].
Eigen::Vector2d range_bearing(const Eigen::Vector4d& x);
Eigen::Matrix<double, 2, 4> range_bearing_jacobian(const Eigen::Vector4d& x);

// Process noise factor G scaled by the noise standard deviation; the
// induced state covariance G Q G' has rank 2.
Eigen::Matrix<double, 4, 2> tracking_noise_gain();

StateSpaceModel make_tracking_model(const TrackingModelConfig& cfg);

// --- Linear-Gaussian / stochastic-volatility switching model -----------
//
// x_t = phi x_{t-1} + q_t and y_t = u_t V_t r_t + (1-u_t)(x_t + r_t)
// with V_t = beta diag(exp(x_i / sigma)) and a known input u_t that
// toggles between the linear and volatility regimes every 20 steps.

struct SwitchingModelConfig {
  int dim = 4;
  double phi = 0.8;
  double beta = 0.5;
  double sigma = 4.0;
  double process_var = 10.0;   // Q = process_var I
  double obs_var = 0.1;        // R = obs_var I
  double noise_mean = 1e-4;    // r0 = noise_mean * ones
  int switch_period = 20;
};

// u_t schedule: 0 for the first window, toggling each period.
double switching_input(int t, int period);

Eigen::VectorXd switching_observation(const Eigen::VectorXd& x, double u,
                                      const Eigen::VectorXd& r,
                                      const SwitchingModelConfig& cfg);

// Conditionally Gaussian view of the observation at input u: the mean
// map absorbs the state-dependent noise mean and the noise covariance
// carries the volatility scaling.
Transform switching_obs_transform(double u, const SwitchingModelConfig& cfg);

StateSpaceModel make_switching_model(const SwitchingModelConfig& cfg);

}  // namespace agsf
