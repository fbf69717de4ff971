#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "agsf/errors.hpp"
#include "agsf/gaussian.hpp"
#include "agsf/resampling.hpp"
#include "oracles.hpp"

using namespace agsf;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::MatrixXd mat1(double x) {
  Eigen::MatrixXd m(1, 1);
  m << x;
  return m;
}

Eigen::MatrixXd random_psd(int d, RngStream& rng, double ridge = 0.1) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("log_pdf: standard normal at its mode") {
  const Gaussian g{vec1(0.0), mat1(1.0)};
  CHECK(log_pdf(g, vec1(0.0)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("log_pdf: isotropic bivariate case") {
  const Gaussian g{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  Eigen::VectorXd x(2);
  x << 1.0, 1.0;
  CHECK(log_pdf(g, x) ==
        doctest::Approx(-std::log(2.0 * M_PI) - 1.0).epsilon(1e-12));
}

TEST_CASE("log_pdf matches quadrature normalization") {
  // N(2, 4) at x = 0 against a trapezoid-rule normalizer on [-20, 20]
  const Gaussian g{vec1(2.0), mat1(4.0)};
  const double z = oracles::trapezoid(
      [](double x) { return std::exp(-(x - 2.0) * (x - 2.0) / 8.0); }, -20.0,
      20.0, 4000);
  const double expected = -((0.0 - 2.0) * (0.0 - 2.0)) / 8.0 - std::log(z);
  CHECK(log_pdf(g, vec1(0.0)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("log_pdf applies the jitter ladder, then fails") {
  Eigen::MatrixXd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  const Gaussian singular{Eigen::VectorXd::Zero(2), rank1};
  CHECK(std::isfinite(log_pdf(singular, Eigen::VectorXd::Zero(2))));

  const Gaussian zero{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(log_pdf(zero, Eigen::VectorXd::Zero(2)),
                  SingularCovarianceError);
}

TEST_CASE("sample: zero covariance returns the mean, rng untouched") {
  RngStream rng(7);
  const RngStream before = rng;
  const Gaussian g{vec1(3.5), mat1(0.0)};
  const auto draws = sample(g, rng, 3);
  REQUIRE(draws.size() == 3);
  for (const auto& d : draws) CHECK(d[0] == 3.5);
  CHECK(rng == before);
}

TEST_CASE("sample: law of large numbers in two dimensions") {
  RngStream rng(42);
  const Gaussian g{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  const int n = 100000;
  const auto draws = sample(g, rng, n);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& d : draws) mean += d;
  mean /= n;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& d : draws) {
    const Eigen::Vector2d r = d - mean;
    cov += r * r.transpose();
  }
  cov /= n - 1;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
  CHECK((cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample: deterministic under a fixed seed") {
  const Gaussian g{Eigen::VectorXd::Zero(3),
                   Eigen::MatrixXd::Identity(3, 3) * 2.0};
  RngStream a(123), b(123);
  const auto da = sample(g, a, 5);
  const auto db = sample(g, b, 5);
  for (int i = 0; i < 5; ++i) CHECK(da[i] == db[i]);
}

TEST_CASE("sample rejects indefinite covariance") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  RngStream rng(1);
  CHECK_THROWS_AS(sample(Gaussian{Eigen::VectorXd::Zero(2), bad}, rng, 1),
                  IndefiniteCovarianceError);
}

TEST_CASE("mixture_log_pdf: single and duplicated components") {
  const Gaussian g{vec1(0.3), mat1(2.0)};
  GaussianMixture single;
  single.weights = Eigen::VectorXd::Ones(1);
  single.components = {g};
  CHECK(mixture_log_pdf(single, vec1(1.0)) ==
        doctest::Approx(log_pdf(g, vec1(1.0))).epsilon(1e-14));

  GaussianMixture dup;
  dup.weights = Eigen::VectorXd::Constant(2, 0.5);
  dup.components = {g, g};
  CHECK(mixture_log_pdf(dup, vec1(1.0)) ==
        doctest::Approx(log_pdf(g, vec1(1.0))).epsilon(1e-14));
}

TEST_CASE("mixture_log_pdf matches a naive linear-space sum") {
  RngStream rng(5);
  GaussianMixture mix;
  mix.weights = Eigen::VectorXd(3);
  mix.weights << 0.2, 0.5, 0.3;
  for (int k = 0; k < 3; ++k) {
    mix.components.push_back(
        Gaussian{Eigen::VectorXd::Constant(2, 0.5 * k), random_psd(2, rng)});
  }
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  double naive = 0.0;
  for (int k = 0; k < 3; ++k) {
    naive += mix.weights[k] *
             oracles::dense_mvn_pdf(x, mix.components[k].mean,
                                    mix.components[k].cov);
  }
  CHECK(mixture_log_pdf(mix, x) ==
        doctest::Approx(std::log(naive)).epsilon(1e-10));
}

TEST_CASE("mixture_moments: identity on one component") {
  RngStream rng(9);
  const Gaussian g{Eigen::VectorXd::Constant(3, 1.5), random_psd(3, rng)};
  GaussianMixture mix;
  mix.weights = Eigen::VectorXd::Ones(1);
  mix.components = {g};
  const Gaussian mm = mixture_moments(mix);
  CHECK((mm.mean - g.mean).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((mm.cov - g.cov).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mixture_moments: symmetric two-point mass") {
  GaussianMixture mix;
  mix.weights = Eigen::VectorXd::Constant(2, 0.5);
  mix.components = {Gaussian{vec1(1.0), mat1(0.0)},
                    Gaussian{vec1(-1.0), mat1(0.0)}};
  const Gaussian mm = mixture_moments(mix);
  CHECK(mm.mean[0] == doctest::Approx(0.0));
  CHECK(mm.cov(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("mixture_moments agrees with Monte-Carlo sampling") {
  RngStream rng(2024);
  GaussianMixture mix;
  Eigen::VectorXd w(5);
  w << 0.1, 0.3, 0.2, 0.25, 0.15;
  mix.weights = w;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd mu(2);
    mu << rng.normal(), rng.normal();
    mix.components.push_back(Gaussian{mu, random_psd(2, rng)});
  }
  const Gaussian mm = mixture_moments(mix);

  // sampling oracle: component index by CDF inversion, then one draw
  const int n = 1000000;
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  Eigen::Matrix2d acc2 = Eigen::Matrix2d::Zero();
  std::vector<Eigen::MatrixXd> roots;
  for (int k = 0; k < 5; ++k) roots.push_back(psd_sqrt(mix.components[k].cov));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    int k = 0;
    double cum = w[0];
    while (u > cum && k < 4) cum += w[++k];
    const Eigen::Vector2d z =
        mix.components[k].mean + roots[k] * rng.normals(2);
    acc += z;
    acc2 += z * z.transpose();
  }
  const Eigen::Vector2d mc_mean = acc / n;
  const Eigen::Matrix2d mc_cov =
      acc2 / n - mc_mean * mc_mean.transpose();

  // 3 standard errors, entrywise
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(mm.cov(i, i) / n);
    CHECK(std::abs(mc_mean[i] - mm.mean[i]) < 3.0 * se);
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double se =
          std::sqrt(2.0) * mm.cov(i, i) / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(mc_cov(i, j) - mm.cov(i, j)) < 3.0 * se + 1e-3);
    }
  }
}

TEST_CASE("condition_joint: textbook scalar update") {
  // x ~ N(0,1), y = x + r with r ~ N(0,1); observing y=2 gives N(1, 1/2)
  JointGaussian joint;
  joint.mean_x = vec1(0.0);
  joint.mean_y = vec1(0.0);
  joint.cov_x = mat1(1.0);
  joint.cov_y = mat1(2.0);
  joint.cov_xy = mat1(1.0);
  const ConditionResult cr = condition_joint(joint, vec1(2.0));
  CHECK(cr.posterior.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cr.posterior.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cr.log_evidence ==
        doctest::Approx(std::log(oracles::normal_pdf(2.0, 0.0, 2.0)))
            .epsilon(1e-12));
}

TEST_CASE("condition_mixture: zero cross-covariance leaves components") {
  RngStream rng(3);
  std::vector<std::pair<double, JointGaussian>> joints;
  for (int k = 0; k < 2; ++k) {
    JointGaussian j;
    j.mean_x = Eigen::VectorXd::Constant(2, k);
    j.mean_y = Eigen::VectorXd::Constant(2, -k);
    j.cov_x = random_psd(2, rng);
    j.cov_y = random_psd(2, rng);
    j.cov_xy = Eigen::MatrixXd::Zero(2, 2);
    joints.emplace_back(0.5, j);
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  const GaussianMixture post = condition_mixture(joints, y);
  CHECK(post.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < 2; ++k) {
    CHECK((post.components[k].mean - joints[k].second.mean_x)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((post.components[k].cov - joints[k].second.cov_x)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  // reweighting favors the component whose y-marginal explains y better
  const double l0 = std::log(0.5) + log_pdf(joints[0].second.marginal_y(), y);
  const double l1 = std::log(0.5) + log_pdf(joints[1].second.marginal_y(), y);
  CHECK(post.weights[0] / post.weights[1] ==
        doctest::Approx(std::exp(l0 - l1)).epsilon(1e-10));
}

TEST_CASE("condition_mixture matches grid quadrature in one dimension") {
  // K=2 scalar joints; the oracle integrates the joint density over x
  std::vector<std::pair<double, JointGaussian>> joints;
  JointGaussian a;
  a.mean_x = vec1(-0.5);
  a.mean_y = vec1(0.2);
  a.cov_x = mat1(1.0);
  a.cov_y = mat1(0.8);
  a.cov_xy = mat1(0.4);
  JointGaussian b;
  b.mean_x = vec1(1.2);
  b.mean_y = vec1(-0.4);
  b.cov_x = mat1(0.6);
  b.cov_y = mat1(1.4);
  b.cov_xy = mat1(-0.3);
  joints.emplace_back(0.35, a);
  joints.emplace_back(0.65, b);

  const double y = 0.5;
  const GaussianMixture post = condition_mixture(joints, vec1(y));

  auto joint_density = [&](double x, double yy) {
    double acc = 0.0;
    for (const auto& [w, j] : joints) {
      Eigen::VectorXd v(2);
      v << x, yy;
      acc += w * oracles::dense_mvn_pdf(v, j.stacked().mean, j.stacked().cov);
    }
    return acc;
  };
  const double p_y = oracles::trapezoid(
      [&](double x) { return joint_density(x, y); }, -15.0, 15.0, 3000);

  for (int i = 0; i <= 20; ++i) {
    const double x = -3.0 + 0.3 * i;
    const double expected = joint_density(x, y) / p_y;
    const double got = std::exp(mixture_log_pdf(post, vec1(x)));
    CHECK(std::abs(got - expected) < 1e-6);
  }
}

TEST_CASE("condition_mixture underflow raises") {
  JointGaussian j;
  j.mean_x = vec1(0.0);
  j.mean_y = vec1(0.0);
  j.cov_x = mat1(1.0);
  j.cov_y = mat1(1e-6);
  j.cov_xy = mat1(0.0);
  std::vector<std::pair<double, JointGaussian>> joints{{1.0, j}};
  CHECK_THROWS_AS(condition_mixture(joints, vec1(1e170)),
                  WeightUnderflowError);
}

TEST_CASE("psd_sqrt basics") {
  CHECK((psd_sqrt(Eigen::MatrixXd::Identity(3, 3)) -
         Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  Eigen::MatrixXd d(2, 2);
  d << 4.0, 0.0, 0.0, 9.0;
  const Eigen::MatrixXd r = psd_sqrt(d);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(1, 1) == doctest::Approx(3.0));

  RngStream rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd s = random_psd(4, rng, 0.0);
    const Eigen::MatrixXd root = psd_sqrt(s);
    CHECK((root * root.transpose() - s).norm() < 1e-10);
  }

  // semidefinite input goes through the eigen route
  Eigen::MatrixXd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  const Eigen::MatrixXd root = psd_sqrt(rank1);
  CHECK((root * root.transpose() - rank1).norm() < 1e-10);

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1e-6;
  CHECK_THROWS_AS(psd_sqrt(bad), IndefiniteCovarianceError);
}

TEST_CASE("multinomial_resample: one-hot weights") {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
  w[2] = 1.0;
  RngStream rng(8);
  for (int idx : multinomial_resample(w, 50, rng)) CHECK(idx == 2);
}

TEST_CASE("multinomial_resample: empirical frequencies") {
  const int k = 5, m = 100000;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / k);
  RngStream rng(21);
  std::vector<int> counts(k, 0);
  for (int idx : multinomial_resample(w, m, rng)) counts[idx]++;
  for (int i = 0; i < k; ++i) {
    CHECK(std::abs(static_cast<double>(counts[i]) / m - 1.0 / k) < 0.01);
  }
}

TEST_CASE("multinomial_resample: determinism and degenerate weights") {
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.0 / 3);
  RngStream a(33), b(33);
  CHECK(multinomial_resample(w, 20, a) == multinomial_resample(w, 20, b));

  RngStream rng(1);
  CHECK_THROWS_AS(multinomial_resample(Eigen::VectorXd::Zero(3), 5, rng),
                  DegenerateWeightsError);
}

TEST_CASE("systematic_resample consumes one uniform and matches weights") {
  Eigen::VectorXd w(4);
  w << 0.1, 0.2, 0.3, 0.4;
  RngStream rng(77);
  const int m = 100000;
  std::vector<int> counts(4, 0);
  for (int idx : systematic_resample(w, m, rng)) counts[idx]++;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(static_cast<double>(counts[i]) / m - w[i]) < 0.01);
  }
}

TEST_CASE("gaussian invariants validated") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS((Gaussian{Eigen::VectorXd::Zero(2), asym}.validate()),
                  ModelError);

  GaussianMixture mix;
  mix.weights = Eigen::VectorXd::Constant(2, 0.4);  // sums to 0.8
  mix.components = {Gaussian{vec1(0.0), mat1(1.0)},
                    Gaussian{vec1(1.0), mat1(1.0)}};
  CHECK_THROWS_AS(mix.validate(), ModelError);
}
