#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "agsf/errors.hpp"
#include "agsf/models.hpp"
#include "agsf/ssm.hpp"
#include "oracles.hpp"

using namespace agsf;

namespace {

StateSpaceModel noiseless_linear_model() {
  Eigen::MatrixXd a(2, 2);
  a << 0.9, 0.1, 0.0, 0.8;
  StateSpaceModel m;
  m.name = "noiseless";
  m.state_dim = 2;
  m.obs_dim = 2;
  m.initial_belief = Gaussian{Eigen::VectorXd::Ones(2),
                              Eigen::MatrixXd::Zero(2, 2)};
  m.dynamics = [a](int) {
    return make_affine_transform(a, Eigen::VectorXd::Zero(2),
                                 Eigen::MatrixXd::Zero(2, 2));
  };
  m.observation = [](int) {
    return make_affine_transform(Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::VectorXd::Zero(2),
                                 Eigen::MatrixXd::Zero(2, 2));
  };
  return m;
}

}  // namespace

TEST_CASE("simulate: noiseless linear model follows matrix powers") {
  const StateSpaceModel m = noiseless_linear_model();
  RngStream rng(1);
  const Trajectory traj = simulate(m, 5, rng);
  Eigen::MatrixXd a(2, 2);
  a << 0.9, 0.1, 0.0, 0.8;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  for (int t = 0; t < 5; ++t) {
    x = a * x;
    CHECK((traj.states[t] - x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((traj.observations[t] - x).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("simulate: bit-identical under a fixed seed") {
  const StateSpaceModel m = make_tracking_model(TrackingModelConfig{});
  RngStream a(7), b(7);
  const Trajectory ta = simulate(m, 50, a);
  const Trajectory tb = simulate(m, 50, b);
  for (int t = 0; t < 50; ++t) {
    CHECK(ta.states[t] == tb.states[t]);
    CHECK(ta.observations[t] == tb.observations[t]);
  }
}

TEST_CASE("tracking dynamics: first turn phase arcs with constant sign") {
  TrackingModelConfig cfg;
  cfg.horizon = 500;
  Eigen::Vector4d x = cfg.initial_state;
  double reference = 0.0;
  for (int t = 1; t <= 200; ++t) {
    const Eigen::Vector4d next = tracking_dynamics(x, t, cfg);
    const double cross = x[1] * next[3] - x[3] * next[1];
    if (t == 1) {
      reference = cross;
      CHECK(cross != 0.0);
    } else {
      CHECK(cross * reference > 0.0);
    }
    x = next;
  }
}

TEST_CASE("ct_matrix: zero-turn limit equals constant velocity") {
  CHECK((ct_matrix(0.0, 1.0) - cv_matrix(1.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ct_matrix(1e-9, 1.0) - cv_matrix(1.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ct_matrix(1e-7, 1.0) - cv_matrix(1.0)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("ct_matrix: hand evaluation at omega = pi") {
  const Eigen::Matrix4d f = ct_matrix(M_PI, 1.0);
  CHECK(f(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f(0, 3) == doctest::Approx(-2.0 / M_PI));
  CHECK(f(2, 1) == doctest::Approx(2.0 / M_PI));
  CHECK(f(1, 1) == doctest::Approx(-1.0));
  CHECK(f(3, 3) == doctest::Approx(-1.0));
  CHECK(f(1, 3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ct_matrix: forward and reverse turns preserve speed") {
  Eigen::Vector4d x;
  x << 2.0, 1.5, -1.0, 0.5;
  const double speed = std::hypot(x[1], x[3]);
  const Eigen::Vector4d y = ct_matrix(0.3, 1.0) * (ct_matrix(-0.3, 1.0) * x);
  CHECK(std::hypot(y[1], y[3]) == doctest::Approx(speed).epsilon(1e-9));
}

TEST_CASE("tracking_dynamics: constant-velocity phase") {
  TrackingModelConfig cfg;
  cfg.horizon = 200;
  Eigen::Vector4d x;
  x << 0.0, 1.0, 0.0, 2.0;
  const Eigen::Vector4d next = tracking_dynamics(x, 100, cfg);  // CV window
  CHECK(next[0] == doctest::Approx(1.0));
  CHECK(next[1] == doctest::Approx(1.0));
  CHECK(next[2] == doctest::Approx(2.0));
  CHECK(next[3] == doctest::Approx(2.0));
}

TEST_CASE("turn_rate: hand arithmetic and the zero-speed error") {
  Eigen::Vector4d x;
  x << 0.0, 3.0, 0.0, 4.0;
  CHECK(turn_rate(x, 0.5, +1) == doctest::Approx(0.1));
  CHECK(turn_rate(x, 0.5, -1) == doctest::Approx(-0.1));
  Eigen::Vector4d still;
  still << 1.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(turn_rate(still, 0.5, +1), ModelError);
}

TEST_CASE("tracking_dynamics: turn step preserves speed") {
  TrackingModelConfig cfg;
  cfg.horizon = 200;
  Eigen::Vector4d x;
  x << 10.0, 1.2, -5.0, 0.9;
  const Eigen::Vector4d next = tracking_dynamics(x, 10, cfg);  // CT+ window
  CHECK(std::hypot(next[1], next[3]) ==
        doctest::Approx(std::hypot(x[1], x[3])).epsilon(1e-9));
}

TEST_CASE("range_bearing values and branch cut") {
  Eigen::Vector4d x;
  x << 3.0, 0.0, 4.0, 0.0;
  const Eigen::Vector2d rb = range_bearing(x);
  CHECK(rb[0] == doctest::Approx(5.0));
  CHECK(rb[1] == doctest::Approx(0.9272952180016122));

  x << 1.0, 0.0, 0.0, 0.0;
  CHECK(range_bearing(x)[0] == doctest::Approx(1.0));
  CHECK(range_bearing(x)[1] == doctest::Approx(0.0));

  x << -1.0, 0.0, 0.0, 0.0;
  CHECK(range_bearing(x)[1] == doctest::Approx(M_PI));

  x << 0.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(range_bearing(x), ModelError);
}

TEST_CASE("tracking process noise has rank two") {
  const Eigen::Matrix<double, 4, 2> g = tracking_noise_gain();
  const Eigen::Matrix4d cov = 1e-6 * g * g.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
  int positive = 0;
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues()[i] > 1e-12) ++positive;
  }
  CHECK(positive == 2);
}

TEST_CASE("tracking jacobian differentiates through the turn rate") {
  TrackingModelConfig cfg;
  cfg.horizon = 200;
  const StateSpaceModel model = make_tracking_model(cfg);
  const Transform dyn = model.dynamics(10);  // CT+ window
  Eigen::VectorXd x(4);
  x << 20.0, 1.0, 30.0, -0.5;
  const Eigen::MatrixXd full = dyn.jacobian_at(x);
  const Eigen::Matrix4d frozen =
      ct_matrix(turn_rate(x, cfg.turn_acceleration, +1), cfg.dt);
  CHECK((full - frozen).cwiseAbs().maxCoeff() > 1e-4);

  TrackingModelConfig frozen_cfg = cfg;
  frozen_cfg.frozen_turn_rate_jacobian = true;
  const StateSpaceModel frozen_model = make_tracking_model(frozen_cfg);
  const Eigen::MatrixXd frozen_jac = frozen_model.dynamics(10).jacobian_at(x);
  CHECK((frozen_jac - frozen).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("range_bearing jacobian matches finite differences") {
  Eigen::VectorXd x(4);
  x << 12.0, 0.3, -7.0, 1.1;
  const auto map = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return range_bearing(v);
  };
  const Eigen::MatrixXd fd = finite_difference_jacobian(map, x, 2);
  const Eigen::MatrixXd analytic = range_bearing_jacobian(x);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double scale = std::max(std::abs(fd(i, j)), 1e-8);
      CHECK(std::abs(analytic(i, j) - fd(i, j)) / scale < 1e-4);
    }
  }
}

TEST_CASE("switching input schedule toggles every period") {
  for (int t = 1; t <= 100; ++t) {
    CHECK(switching_input(t, 20) ==
          doctest::Approx(static_cast<double>(((t - 1) / 20) % 2)));
  }
  CHECK(switching_input(1, 20) == 0.0);
  CHECK(switching_input(20, 20) == 0.0);
  CHECK(switching_input(21, 20) == 1.0);
  CHECK(switching_input(41, 20) == 0.0);
}

TEST_CASE("switching_observation: linear regime") {
  SwitchingModelConfig cfg;
  Eigen::VectorXd x(4), r(4);
  x << 1.0, -2.0, 0.5, 0.0;
  r << 0.1, 0.2, -0.1, 0.05;
  const Eigen::VectorXd y = switching_observation(x, 0.0, r, cfg);
  CHECK((y - (x + r)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("switching_observation: volatility regime at the origin") {
  SwitchingModelConfig cfg;
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd r(4);
  r << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd y = switching_observation(x, 1.0, r, cfg);
  CHECK((y - 0.5 * r).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("switching transform carries the exact conditional law") {
  SwitchingModelConfig cfg;
  const Transform g = switching_obs_transform(1.0, cfg);
  Eigen::VectorXd x(4);
  x << 1.0, -1.0, 2.0, 0.0;
  const Eigen::MatrixXd cov = g.noise_cov_at(x);
  for (int i = 0; i < 4; ++i) {
    const double vol = cfg.beta * std::exp(x[i] / cfg.sigma);
    CHECK(cov(i, i) == doctest::Approx(vol * vol * cfg.obs_var));
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(cov(i, j) == 0.0);
    }
  }
  const Eigen::VectorXd mean = g.apply(x);
  for (int i = 0; i < 4; ++i) {
    CHECK(mean[i] == doctest::Approx(cfg.beta * std::exp(x[i] / cfg.sigma) *
                                     cfg.noise_mean));
  }
}

TEST_CASE("switching jacobian matches finite differences") {
  SwitchingModelConfig cfg;
  for (const double u : {0.0, 0.3, 1.0}) {
    const Transform g = switching_obs_transform(u, cfg);
    Eigen::VectorXd x(4);
    x << 0.5, -1.5, 3.0, 0.1;
    const Eigen::MatrixXd fd = finite_difference_jacobian(g.map, x, 4);
    const Eigen::MatrixXd analytic = g.jacobian_at(x);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double scale = std::max(std::abs(fd(i, j)), 1e-6);
        CHECK(std::abs(analytic(i, j) - fd(i, j)) / scale < 1e-4);
      }
    }
  }
}

TEST_CASE("observation slice densities are normalized") {
  // both models have diagonal conditional observation covariance, so
  // each coordinate's conditional density must integrate to one
  const StateSpaceModel tracking = make_tracking_model(TrackingModelConfig{});
  Eigen::VectorXd x(4);
  x << 30.0, 1.0, 40.0, 0.0;
  const Transform g1 = tracking.observation(3);
  const Eigen::VectorXd m1 = g1.apply(x) + g1.noise_mean_or_zero();
  const Eigen::MatrixXd s1 = g1.noise_cov_at(x);
  for (int i = 0; i < 2; ++i) {
    const double sd = std::sqrt(s1(i, i));
    const double integral = oracles::trapezoid(
        [&](double s) { return oracles::normal_pdf(s, m1[i], s1(i, i)); },
        m1[i] - 10 * sd, m1[i] + 10 * sd, 2000);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
  }

  const StateSpaceModel switching =
      make_switching_model(SwitchingModelConfig{});
  const Transform g2 = switching.observation(25);  // volatility window
  Eigen::VectorXd z(4);
  z << 1.0, 0.0, -2.0, 0.5;
  const Eigen::VectorXd m2 = g2.apply(z) + g2.noise_mean_or_zero();
  const Eigen::MatrixXd s2 = g2.noise_cov_at(z);
  for (int i = 0; i < 4; ++i) {
    const double sd = std::sqrt(s2(i, i));
    const double integral = oracles::trapezoid(
        [&](double s) { return oracles::normal_pdf(s, m2[i], s2(i, i)); },
        m2[i] - 10 * sd, m2[i] + 10 * sd, 2000);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("switching initial belief is the stationary law") {
  SwitchingModelConfig cfg;
  const StateSpaceModel m = make_switching_model(cfg);
  const double expected = cfg.process_var / (1.0 - cfg.phi * cfg.phi);
  CHECK(m.initial_belief.cov(0, 0) == doctest::Approx(expected));
  // one dynamics step from stationarity returns to the same covariance
  CHECK(cfg.phi * cfg.phi * expected + cfg.process_var ==
        doctest::Approx(expected));
}

TEST_CASE("trajectory serialization round trip") {
  const StateSpaceModel m = make_switching_model(SwitchingModelConfig{});
  RngStream rng(5);
  const Trajectory traj = simulate(m, 25, rng);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "agsf_ssm_test";
  std::filesystem::create_directories(dir);
  write_trajectory_csv(traj, dir / "traj.csv");
  write_trajectory_jsonl(traj, dir / "traj.jsonl");

  const Trajectory back = read_trajectory_jsonl(dir / "traj.jsonl");
  REQUIRE(back.length() == traj.length());
  for (int t = 0; t < traj.length(); ++t) {
    CHECK((back.states[t] - traj.states[t]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.observations[t] - traj.observations[t])
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(back.inputs[t] == traj.inputs[t]);
  }

  std::ifstream csv(dir / "traj.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,x1,x2,x3,x4,y1,y2,y3,y4,u");
  std::filesystem::remove_all(dir);
}

TEST_CASE("read_trajectory_jsonl surfaces the path on failure") {
  try {
    read_trajectory_jsonl("/nonexistent/file.jsonl");
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/file.jsonl") !=
          std::string::npos);
  }
}
