#include "agsf/models.hpp"

#include <cmath>

#include "agsf/errors.hpp"

namespace agsf {

namespace {
constexpr double kProcessNoiseVar = 1e-6;   // Q = 1e-6 I2
constexpr double kProcessCovJitter = 1e-12; // keeps the filter-facing covariance invertible
constexpr double kOmegaTaylorCutoff = 1e-8;
}  // namespace

Eigen::Matrix4d cv_matrix(double dt) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = dt;
  f(2, 3) = dt;
  return f;
}

Eigen::Matrix4d ct_matrix(double omega, double dt) {
  if (std::abs(omega) < kOmegaTaylorCutoff) return cv_matrix(dt);
  const double s = std::sin(omega * dt);
  const double c = std::cos(omega * dt);
  Eigen::Matrix4d f;
  f << 1.0, s / omega, 0.0, -(1.0 - c) / omega,
       0.0, c,         0.0, -s,
       0.0, (1.0 - c) / omega, 1.0, s / omega,
       0.0, s,         0.0, c;
  return f;
}

double turn_rate(const Eigen::Vector4d& x, double accel, int sign) {
  const double speed = std::hypot(x[1], x[3]);
  if (!(speed > 0.0)) {
    throw ModelError("zero speed: turn rate undefined in constant-turn phase");
  }
  return sign * accel / speed;
}

Eigen::Vector4d tracking_dynamics(const Eigen::Vector4d& x, int t,
                                  const TrackingModelConfig& cfg) {
  const int T = cfg.horizon;
  Eigen::Matrix4d f;
  if (t <= 2 * T / 5) {
    f = ct_matrix(turn_rate(x, cfg.turn_acceleration, +1), cfg.dt);
  } else if (t <= 3 * T / 5) {
    f = cv_matrix(cfg.dt);
  } else {
    f = ct_matrix(turn_rate(x, cfg.turn_acceleration, -1), cfg.dt);
  }
  return f * x;
}

Eigen::Vector2d range_bearing(const Eigen::Vector4d& x) {
  if (x[0] == 0.0 && x[2] == 0.0) {
    throw ModelError("bearing undefined at the origin");
  }
  return {std::hypot(x[0], x[2]), std::atan2(x[2], x[0])};
}

Eigen::Matrix<double, 2, 4> range_bearing_jacobian(const Eigen::Vector4d& x) {
  const double r2 = x[0] * x[0] + x[2] * x[2];
  if (r2 == 0.0) throw ModelError("bearing undefined at the origin");
  const double r = std::sqrt(r2);
  Eigen::Matrix<double, 2, 4> jac = Eigen::Matrix<double, 2, 4>::Zero();
  jac(0, 0) = x[0] / r;
  jac(0, 2) = x[2] / r;
  jac(1, 0) = -x[2] / r2;
  jac(1, 2) = x[0] / r2;
  return jac;
}

Eigen::Matrix<double, 4, 2> tracking_noise_gain() {
  Eigen::Matrix<double, 4, 2> g;
  g << 0.5, 1.0,
       1.0, 0.0,
       0.0, 0.5,
       0.0, 1.0;
  return g;
}

StateSpaceModel make_tracking_model(const TrackingModelConfig& cfg) {
  const Eigen::Matrix<double, 4, 2> gain = tracking_noise_gain();
  const Eigen::Matrix4d process_cov =
      kProcessNoiseVar * gain * gain.transpose() +
      kProcessCovJitter * Eigen::Matrix4d::Identity();
  const Eigen::Matrix2d obs_cov =
      cfg.obs_noise_var * Eigen::Matrix2d::Identity();

  StateSpaceModel model;
  model.name = "tracking";
  model.state_dim = 4;
  model.obs_dim = 2;
  model.initial_belief =
      Gaussian{cfg.initial_state, cfg.initial_cov_diag.asDiagonal()};
  model.process_noise_factor = [gain](int) -> Eigen::MatrixXd {
    return std::sqrt(kProcessNoiseVar) * gain;
  };

  model.dynamics = [cfg, process_cov](int t) {
    Transform f;
    f.in_dim = f.out_dim = 4;
    f.map = [cfg, t](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return tracking_dynamics(x, t, cfg);
    };
    if (cfg.frozen_turn_rate_jacobian) {
      f.jacobian = [cfg, t](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        const int T = cfg.horizon;
        if (t <= 2 * T / 5) {
          return ct_matrix(turn_rate(x, cfg.turn_acceleration, +1), cfg.dt);
        }
        if (t <= 3 * T / 5) return cv_matrix(cfg.dt);
        return ct_matrix(turn_rate(x, cfg.turn_acceleration, -1), cfg.dt);
      };
    }
    f.noise_cov = [process_cov](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      return process_cov;
    };
    return f;
  };

  model.observation = [obs_cov](int) {
    Transform g;
    g.in_dim = 4;
    g.out_dim = 2;
    g.map = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return range_bearing(x);
    };
    g.jacobian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
      return range_bearing_jacobian(x);
    };
    g.noise_cov = [obs_cov](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      return obs_cov;
    };
    return g;
  };
  return model;
}

double switching_input(int t, int period) {
  return static_cast<double>(((t - 1) / period) % 2);
}

Eigen::VectorXd switching_observation(const Eigen::VectorXd& x, double u,
                                      const Eigen::VectorXd& r,
                                      const SwitchingModelConfig& cfg) {
  if (u < 0.0 || u > 1.0) throw ModelError("input u must lie in [0, 1]");
  const Eigen::VectorXd vol =
      cfg.beta * (x.array() / cfg.sigma).exp().matrix();
  return u * vol.cwiseProduct(r) + (1.0 - u) * (x + r);
}

Transform switching_obs_transform(double u, const SwitchingModelConfig& cfg) {
  if (u < 0.0 || u > 1.0) throw ModelError("input u must lie in [0, 1]");
  const int d = cfg.dim;
  Transform g;
  g.in_dim = g.out_dim = d;
  // scale(x) = u V(x) + (1-u) I, diagonal
  auto scale = [u, cfg](const Eigen::VectorXd& x) -> Eigen::ArrayXd {
    return u * cfg.beta * (x.array() / cfg.sigma).exp() + (1.0 - u);
  };
  g.map = [u, cfg, scale](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return (1.0 - u) * x + (scale(x) * cfg.noise_mean).matrix();
  };
  g.jacobian = [u, cfg](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::ArrayXd diag =
        (1.0 - u) + u * cfg.beta * (x.array() / cfg.sigma).exp() *
                        cfg.noise_mean / cfg.sigma;
    return diag.matrix().asDiagonal();
  };
  g.hessians = [u, cfg, d](const Eigen::VectorXd& x) {
    std::vector<Eigen::MatrixXd> hess(d, Eigen::MatrixXd::Zero(d, d));
    for (int i = 0; i < d; ++i) {
      hess[i](i, i) = u * cfg.beta * std::exp(x[i] / cfg.sigma) *
                      cfg.noise_mean / (cfg.sigma * cfg.sigma);
    }
    return hess;
  };
  g.noise_cov = [cfg, scale](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::ArrayXd s = scale(x);
    return (s * s * cfg.obs_var).matrix().asDiagonal();
  };
  return g;
}

StateSpaceModel make_switching_model(const SwitchingModelConfig& cfg) {
  const int d = cfg.dim;
  const Eigen::MatrixXd phi = cfg.phi * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd q = cfg.process_var * Eigen::MatrixXd::Identity(d, d);

  StateSpaceModel model;
  model.name = "switching";
  model.state_dim = d;
  model.obs_dim = d;
  // stationary law of the linear dynamics
  const double stationary_var = cfg.process_var / (1.0 - cfg.phi * cfg.phi);
  model.initial_belief =
      Gaussian{Eigen::VectorXd::Zero(d),
               stationary_var * Eigen::MatrixXd::Identity(d, d)};
  model.dynamics = [phi, q, d](int) {
    return make_affine_transform(phi, Eigen::VectorXd::Zero(d), q);
  };
  model.observation = [cfg](int t) {
    return switching_obs_transform(switching_input(t, cfg.switch_period), cfg);
  };
  model.input = [cfg](int t) { return switching_input(t, cfg.switch_period); };
  return model;
}

}  // namespace agsf
