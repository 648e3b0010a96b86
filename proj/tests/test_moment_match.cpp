#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/harness/validation.hpp"
#include "gpsmooth/mm/moment_match.hpp"
#include "gpsmooth/systems/pendulum.hpp"
#include "support/test_util.hpp"

using namespace gpsmooth;

namespace {

GaussianBelief belief1d(double mu, double var) {
  return GaussianBelief(Eigen::VectorXd::Constant(1, mu), Eigen::MatrixXd::Constant(1, 1, var));
}

}  // namespace

TEST_CASE("compute_q limits") {
  Rng rng(3);

  SUBCASE("deterministic input reduces q to the kernel vector") {
    const auto m = test::random_gp(rng, 12, 2, 2);
    const Eigen::Vector2d mu(0.3, -0.4);
    const auto s = mm::compute_q(m, GaussianBelief(mu, Eigen::Matrix2d::Zero()));
    for (Eigen::Index a = 0; a < 2; ++a) {
      for (Eigen::Index i = 0; i < 12; ++i) {
        const double k = gp::se_kernel(m.inputs().row(i).transpose(), mu, m.hyperparams(a));
        CHECK(std::abs(s.q(i, a) - k) <= 1e-12 * std::max(1.0, k));
      }
    }
  }

  SUBCASE("very broad input drives q to zero") {
    const auto m = test::random_gp(rng, 8, 1, 1);
    const auto s = mm::compute_q(m, belief1d(0.0, 1e8));
    CHECK(s.q.col(0).maxCoeff() < 1e-3);
  }

  SUBCASE("hand value: D=1, n=1, unit scales, unit spread") {
    gp::SEHyperparams hp;
    hp.length_scales = Eigen::VectorXd::Constant(1, 1.0);
    hp.signal_variance = 1.0;
    hp.noise_variance = 0.1;
    Eigen::MatrixXd X(1, 1), Y(1, 1);
    X << 1.0;
    Y << 0.5;
    const auto m = gp::GPModel::fit(X, Y, {hp});
    const auto s = mm::compute_q(m, belief1d(0.0, 1.0));
    // (1/sqrt(2)) * exp(-1/4)
    CHECK(s.q(0, 0) == doctest::Approx(std::exp(-0.25) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.q(0, 0) == doctest::Approx(0.55069).epsilon(1e-4));
  }

  SUBCASE("q stays in (0, alpha^2]") {
    for (int inst = 0; inst < 20; ++inst) {
      const auto m = test::random_gp(rng, 10, 2, 2);
      const auto belief =
          GaussianBelief(Eigen::Vector2d(rng.normal(), rng.normal()), test::random_psd(rng, 2, 0.7));
      const auto s = mm::compute_q(m, belief);
      for (Eigen::Index a = 0; a < 2; ++a) {
        CHECK(s.q.col(a).minCoeff() > 0.0);
        CHECK(s.q.col(a).maxCoeff() <= m.hyperparams(a).signal_variance * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("deterministic-input limit matches the point posterior exactly") {
  Rng rng(7);
  const auto m = test::random_gp(rng, 15, 2, 3);
  const Eigen::Vector2d mu(0.2, 0.6);
  const GaussianBelief belief(mu, Eigen::Matrix2d::Zero());

  const auto point = gp::predict_point(m, mu, false);
  const Eigen::VectorXd mean = mm::predict_mean(m, belief);
  const Eigen::MatrixXd cov = mm::predict_cov(m, belief, std::nullopt);
  const Eigen::MatrixXd cross = mm::cross_cov(m, belief);

  for (Eigen::Index a = 0; a < 3; ++a) {
    CHECK(std::abs(mean[a] - point.mean[a]) < 1e-12);
    CHECK(std::abs(cov(a, a) - point.var[a]) < 1e-12);
    for (Eigen::Index b = 0; b < 3; ++b) {
      if (a != b) CHECK(std::abs(cov(a, b)) < 1e-12);
    }
  }
  CHECK(cross.cwiseAbs().maxCoeff() < 1e-12);

  // noise flag adds the learned noise on the diagonal
  const Eigen::MatrixXd cov_n = mm::predict_cov(m, belief, m.noise_variances());
  for (Eigen::Index a = 0; a < 3; ++a) {
    CHECK(cov_n(a, a) ==
          doctest::Approx(cov(a, a) + m.hyperparams(a).noise_variance).epsilon(1e-12));
  }
}

TEST_CASE("linear-data oracle: mean ~ A mu, cross ~ Sigma A^T") {
  // Dense grid on a linear function with short length-scales: the posterior
  // mean is essentially the line, so the moment-matched quantities follow the
  // Kalman identities.
  const double slope = 0.7;
  const int n = 80;
  Eigen::MatrixXd X(n, 1), Y(n, 1);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = -4.0 + 8.0 * i / (n - 1.0);
    Y(i, 0) = slope * X(i, 0);
  }
  gp::SEHyperparams hp;
  hp.length_scales = Eigen::VectorXd::Constant(1, 0.8);
  hp.signal_variance = 4.0;
  hp.noise_variance = 1e-6;
  const auto m = gp::GPModel::fit(X, Y, {hp});

  const GaussianBelief belief = belief1d(0.3, 0.25);
  const Eigen::VectorXd mean = mm::predict_mean(m, belief);
  const Eigen::MatrixXd cross = mm::cross_cov(m, belief);
  CHECK(std::abs(mean[0] - slope * 0.3) < 1e-2 * std::abs(slope * 0.3) + 1e-3);
  CHECK(std::abs(cross(0, 0) - 0.25 * slope) < 1e-2 * std::abs(0.25 * slope));
}

TEST_CASE("Monte-Carlo oracle agreement (input and function sampled)") {
  SUBCASE("1-D model, spec instance") {
    Rng rng(11);
    const auto m = test::random_gp(rng, 14, 1, 1);
    const auto comps = harness::mc_check_moments(m, belief1d(0.1, 0.3), 1000000, 12345);
    for (const auto& c : comps) {
      CAPTURE(c.quantity);
      CHECK(c.z <= 3.0);
    }
  }
  SUBCASE("2-output model, full covariance") {
    Rng rng(13);
    const auto m = test::random_gp(rng, 12, 1, 2);
    const auto comps = harness::mc_check_moments(m, belief1d(0.2, 0.4), 1000000, 999);
    int within = 0;
    for (const auto& c : comps) {
      if (c.z <= 3.0) ++within;
    }
    CHECK(within >= static_cast<int>(comps.size()) - 1);
    CHECK(static_cast<int>(comps.size()) == 2 + 3 + 2);
  }
}

TEST_CASE("propagate shares one scratch and assembles a PSD joint") {
  Rng rng(17);

  SUBCASE("mean path is bitwise shared") {
    const auto m = test::random_gp(rng, 10, 2, 2);
    const GaussianBelief belief(Eigen::Vector2d(0.1, -0.2), test::random_psd(rng, 2, 0.5));
    const auto p = mm::propagate(m, belief, std::nullopt);
    const Eigen::VectorXd mean = mm::predict_mean(m, belief);
    CHECK(p.mean[0] == mean[0]);
    CHECK(p.mean[1] == mean[1]);
  }

  SUBCASE("joint eigenvalue floor over random instances") {
    for (int inst = 0; inst < 100; ++inst) {
      Rng irng(derive_seed(100, static_cast<std::uint64_t>(inst)));
      const Eigen::Index D = 1 + static_cast<Eigen::Index>(irng.next_u64() % 3);
      const Eigen::Index E = 1 + static_cast<Eigen::Index>(irng.next_u64() % 3);
      const Eigen::Index n = 5 + static_cast<Eigen::Index>(irng.next_u64() % 16);
      const auto m = test::random_gp(irng, n, D, E);
      const GaussianBelief belief(test::random_matrix(irng, D, 1),
                                  test::random_psd(irng, D, 0.8));
      const auto p = mm::propagate(m, belief, std::nullopt);
      Eigen::MatrixXd joint(D + E, D + E);
      joint.topLeftCorner(D, D) = belief.cov;
      joint.topRightCorner(D, E) = p.cross_cov;
      joint.bottomLeftCorner(E, D) = p.cross_cov.transpose();
      joint.bottomRightCorner(E, E) = p.cov;
      CHECK(min_eigenvalue(symmetrized(joint)) >= -1e-8);
    }
  }
}

TEST_CASE("translation equivariance") {
  Rng rng(19);
  const auto m = test::random_gp(rng, 12, 2, 2);
  const Eigen::Vector2d mu(0.4, -0.1);
  const Eigen::MatrixXd cov = test::random_psd(rng, 2, 0.6);
  const Eigen::Vector2d shift(3.7, -5.1);

  const auto p1 = mm::propagate(m, GaussianBelief(mu, cov), std::nullopt);
  const auto shifted =
      gp::GPModel::fit(m.inputs().rowwise() + shift.transpose(), m.targets(),
                       {m.hyperparams(0), m.hyperparams(1)});
  const auto p2 = mm::propagate(shifted, GaussianBelief(mu + shift, cov), std::nullopt);

  CHECK((p1.mean - p2.mean).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((p1.cov - p2.cov).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((p1.cross_cov - p2.cross_cov).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("output scaling equivariance") {
  Rng rng(23);
  const auto m = test::random_gp(rng, 10, 1, 2);
  const GaussianBelief belief = belief1d(0.2, 0.5);
  const double c = 3.0;

  // Scale dimension 0's unit: targets by c, signal and noise variances by c^2.
  auto hp0 = m.hyperparams(0);
  hp0.signal_variance *= c * c;
  hp0.noise_variance *= c * c;
  Eigen::MatrixXd Y = m.targets();
  Y.col(0) *= c;
  const auto scaled = gp::GPModel::fit(m.inputs(), Y, {hp0, m.hyperparams(1)});

  const auto p1 = mm::propagate(m, belief, m.noise_variances());
  const auto p2 = mm::propagate(scaled, belief, scaled.noise_variances());
  CHECK(p2.mean[0] == doctest::Approx(c * p1.mean[0]).epsilon(1e-10));
  CHECK(p2.mean[1] == doctest::Approx(p1.mean[1]).epsilon(1e-10));
  CHECK(p2.cov(0, 0) == doctest::Approx(c * c * p1.cov(0, 0)).epsilon(1e-10));
  CHECK(p2.cov(0, 1) == doctest::Approx(c * p1.cov(0, 1)).epsilon(1e-10));
  CHECK(p2.cross_cov(0, 0) == doctest::Approx(c * p1.cross_cov(0, 0)).epsilon(1e-10));
}

TEST_CASE("pendulum time update agrees with the Monte-Carlo oracle") {
  const systems::PendulumParams params;
  const systems::TrainingSet ts = systems::make_pendulum_training(60, params, 777);
  gp::TrainOptions opts;
  opts.restarts = 3;
  const gp::GPModel gp_f = gp::train_gp(ts.f_inputs, ts.f_targets, opts, 778);

  // Prior over (state, torque); torque held at a fixed value.
  Eigen::VectorXd mu(3);
  mu << 0.0, 0.0, 1.5;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  cov(0, 0) = 0.01 * 0.01;
  cov(1, 1) = (M_PI / 16.0) * (M_PI / 16.0);
  const auto comps =
      harness::mc_check_moments(gp_f, GaussianBelief(mu, cov), 1000000, 779);
  int within = 0;
  for (const auto& c : comps) {
    if (c.z <= 3.0) ++within;
  }
  CHECK(within >= static_cast<int>(comps.size()) - 1);
}
