#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpsmooth/filters/filters.hpp"
#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/harness/metrics.hpp"
#include "gpsmooth/harness/validation.hpp"
#include "gpsmooth/systems/kitagawa.hpp"
#include "gpsmooth/systems/linear.hpp"
#include "gpsmooth/systems/pendulum.hpp"
#include "support/test_util.hpp"

using namespace gpsmooth;

namespace {

systems::AnalyticSystem test_linear_2d() {
  Eigen::MatrixXd A(2, 2), C(1, 2);
  A << 0.9, 0.1, 0.0, 0.8;
  C << 1.0, 0.5;
  return systems::linear_system(A, C, Eigen::Vector2d(0.01, 0.02).asDiagonal(),
                                Eigen::MatrixXd::Constant(1, 1, 0.01));
}

double max_dev(const std::vector<GaussianBelief>& a, const std::vector<GaussianBelief>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a[i].mean - b[i].mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[i].cov - b[i].cov).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("analytic filters equal the Kalman filter on a linear system") {
  const auto sys = test_linear_2d();
  const GaussianBelief prior(Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(0.5, 0.5).asDiagonal());
  const auto traj = systems::simulate(sys, prior, 20, 17);
  const auto ref = harness::reference_kalman(
      sys.f_jac(prior.mean, {}), sys.g_jac(prior.mean), sys.process_noise, sys.meas_noise, prior,
      traj.measurements);

  const auto ekf =
      filters::run_filter(filters::EkfFilter(sys), prior, traj.measurements, traj.controls);
  CHECK(max_dev(ekf.filtered, ref.filtered) < 1e-12);

  const auto ukf =
      filters::run_filter(filters::UkfFilter(sys), prior, traj.measurements, traj.controls);
  CHECK(max_dev(ukf.filtered, ref.filtered) < 1e-10);

  const auto ckf =
      filters::run_filter(filters::CkfFilter(sys), prior, traj.measurements, traj.controls);
  CHECK(max_dev(ckf.filtered, ref.filtered) < 1e-10);
}

TEST_CASE("cubature points in 1-D are mu +- sqrt(var)") {
  const GaussianBelief in(Eigen::VectorXd::Constant(1, 0.4),
                          Eigen::MatrixXd::Constant(1, 1, 0.25));
  const auto res = filters::cubature_transform(
      in, [](const Eigen::VectorXd& x) { return x; }, 1);
  CHECK(res.mean[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(res.cov(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  // nonlinear map evaluates exactly at mu +- 0.5
  const auto res2 = filters::cubature_transform(
      in, [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, systems::kitagawa_f(x[0]));
      },
      1);
  const double f1 = systems::kitagawa_f(0.9), f2 = systems::kitagawa_f(-0.1);
  CHECK(res2.mean[0] == doctest::Approx(0.5 * (f1 + f2)).epsilon(1e-13));
}

TEST_CASE("unscented transform underestimates the broad-prior spread") {
  // Time update through the growth map at prior N(0, 0.5^2).
  const GaussianBelief prior(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.25));
  const auto ut = filters::unscented_transform(
      prior,
      [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, systems::kitagawa_f(x[0]));
      },
      1, filters::UtParams{});
  Rng rng(5);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y = systems::kitagawa_f(0.5 * rng.normal());
    sum += y;
    sumsq += y * y;
  }
  const double mc_var = sumsq / n - (sum / n) * (sum / n);
  CHECK(ut.cov(0, 0) < mc_var);  // spread underestimated
}

TEST_CASE("gp-adf") {
  // Small learned system on the growth model.
  const systems::KitagawaParams kp;
  const auto ts = systems::make_kitagawa_training(60, kp, -10.0, 10.0, 21);
  gp::TrainOptions opts;
  opts.restarts = 4;
  auto learned = std::make_shared<const filters::LearnedSystem>(filters::LearnedSystem{
      gp::train_gp(ts.f_inputs, ts.f_targets, opts, 22),
      gp::train_gp(ts.g_inputs, ts.g_targets, opts, 23)});
  const filters::GpAdfFilter filter(learned);
  const GaussianBelief prior(Eigen::VectorXd::Constant(1, 0.5),
                             Eigen::MatrixXd::Constant(1, 1, 0.25));

  SUBCASE("zero innovation keeps the predicted mean") {
    const auto probe = filter.step(prior, {}, Eigen::VectorXd::Zero(1));
    const auto rec = filter.step(prior, {}, probe.predicted_meas.mean);
    CHECK((rec.filtered.mean - rec.predicted.mean).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("filtered covariance never exceeds predicted in the PSD order") {
    Rng rng(31);
    for (int k = 0; k < 20; ++k) {
      const GaussianBelief p(Eigen::VectorXd::Constant(1, rng.uniform(-3, 3)),
                             Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.01, 1.0)));
      const auto rec = filter.step(p, {}, Eigen::VectorXd::Constant(1, rng.uniform(-5, 5)));
      CHECK(min_eigenvalue(rec.predicted.cov - rec.filtered.cov) >= -1e-8);
    }
  }

  SUBCASE("joint matches the prior and time-update blocks") {
    const auto rec = filter.step(prior, {}, Eigen::VectorXd::Constant(1, 1.0));
    CHECK(rec.joint_prev.mean_prev == prior.mean);
    CHECK(rec.joint_prev.mean_next == rec.predicted.mean);
    CHECK(min_eigenvalue(rec.joint_prev.assembled()) >= -1e-8);
  }
}

TEST_CASE("gp-adf explains the true state: finite NLL on 1000 random trials") {
  const systems::KitagawaParams kp;
  const auto ts = systems::make_kitagawa_training(80, kp, -10.0, 10.0, 51);
  gp::TrainOptions opts;
  opts.restarts = 4;
  auto learned = std::make_shared<const filters::LearnedSystem>(filters::LearnedSystem{
      gp::train_gp(ts.f_inputs, ts.f_targets, opts, 52),
      gp::train_gp(ts.g_inputs, ts.g_targets, opts, 53)});
  const filters::GpAdfFilter filter(learned);

  Rng rng(54);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mu0 = rng.uniform(-3.0, 3.0);
    const double x0 = mu0 + 0.5 * rng.normal();
    const double x1 = systems::kitagawa_f(x0) + kp.sigma_w * rng.normal();
    const double z1 = systems::kitagawa_g(x1) + kp.sigma_v * rng.normal();
    const GaussianBelief prior(Eigen::VectorXd::Constant(1, mu0),
                               Eigen::MatrixXd::Constant(1, 1, 0.25));
    const auto rec = filter.step(prior, {}, Eigen::VectorXd::Constant(1, z1));
    const double nll = harness::metric_nll(rec.filtered, Eigen::VectorXd::Constant(1, x1));
    REQUIRE(std::isfinite(nll));
  }
}

TEST_CASE("gp-adf pendulum run: every record PSD-valid over 30 steps") {
  const systems::PendulumParams pp;
  const auto psys = systems::pendulum_system(pp);
  const auto ts = systems::make_pendulum_training(40, pp, 55);
  gp::TrainOptions opts;
  opts.restarts = 2;
  opts.max_iters = 80;
  auto learned = std::make_shared<const filters::LearnedSystem>(filters::LearnedSystem{
      gp::train_gp(ts.f_inputs, ts.f_targets, opts, 56),
      gp::train_gp(ts.g_inputs, ts.g_targets, opts, 57)});
  const auto traj = systems::simulate(psys, systems::pendulum_prior(), 30, 58);
  const auto series = filters::run_filter(filters::GpAdfFilter(learned), systems::pendulum_prior(),
                                          traj.measurements, traj.controls);
  CHECK(series.records.size() == 30);
  for (const auto& rec : series.records) {
    CHECK(min_eigenvalue(rec.filtered.cov) >= -1e-9);
    CHECK(min_eigenvalue(rec.predicted.cov - rec.filtered.cov) >= -1e-8);
    CHECK(min_eigenvalue(rec.joint_prev.assembled()) >= -1e-8);
  }
}

TEST_CASE("gp-adf tracks the Kalman filter after dense linear training") {
  Eigen::MatrixXd A(1, 1), C(1, 1), Q(1, 1), R(1, 1);
  A << 0.9;
  C << 1.0;
  Q << 0.01;
  R << 0.01;
  const auto sys = systems::linear_system(A, C, Q, R);
  const auto ts = systems::make_linear_training(200, sys, -3.0, 3.0, 77);
  gp::TrainOptions opts;
  opts.restarts = 3;
  auto learned = std::make_shared<const filters::LearnedSystem>(filters::LearnedSystem{
      gp::train_gp(ts.f_inputs, ts.f_targets, opts, 78),
      gp::train_gp(ts.g_inputs, ts.g_targets, opts, 79)});

  const GaussianBelief prior(Eigen::VectorXd::Constant(1, 1.0),
                             Eigen::MatrixXd::Constant(1, 1, 0.25));
  const auto traj = systems::simulate(sys, prior, 20, 80);
  const auto ref = harness::reference_kalman(A, C, Q, R, prior, traj.measurements);
  const auto adf = filters::run_filter(filters::GpAdfFilter(learned), prior, traj.measurements,
                                       traj.controls);
  CHECK(max_dev(adf.filtered, ref.filtered) < 5e-2);
}

TEST_CASE("particle filter") {
  SUBCASE("noise-free particles at the true state are preserved") {
    systems::KitagawaParams kp;
    kp.sigma_w = 0.0;
    auto sys = systems::kitagawa_system(kp);
    filters::ParticleCloud cloud;
    cloud.particles = Eigen::MatrixXd::Constant(50, 1, 0.7);
    Rng rng(3);
    const double expected = systems::kitagawa_f(0.7);
    const auto belief = filters::sir_pf_step(
        sys, cloud, {}, Eigen::VectorXd::Constant(1, systems::kitagawa_g(expected)), rng);
    CHECK(belief.mean[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(belief.cov(0, 0) == doctest::Approx(0.0));
    CHECK((cloud.particles.array() == expected).all());
  }

  SUBCASE("linear system: moment-matched belief near the Kalman posterior") {
    const auto sys = test_linear_2d();
    const GaussianBelief prior(Eigen::Vector2d(0.3, -0.2),
                               Eigen::Vector2d(0.5, 0.5).asDiagonal());
    const auto traj = systems::simulate(sys, prior, 3, 41);
    const auto ref = harness::reference_kalman(
        sys.f_jac(prior.mean, {}), sys.g_jac(prior.mean), sys.process_noise, sys.meas_noise,
        prior, traj.measurements);
    const int N = 100000;
    const auto pf =
        filters::run_particle_filter(sys, N, prior, traj.measurements, traj.controls, 42);
    for (int t = 1; t <= 3; ++t) {
      for (int d = 0; d < 2; ++d) {
        // resampling inflates the estimator variance by roughly (1+t)
        const double se =
            std::sqrt((1.0 + t) * ref.filtered[t].cov(d, d) / static_cast<double>(N));
        CHECK(std::abs(pf.filtered[t].mean[d] - ref.filtered[t].mean[d]) <= 3.0 * se);
      }
    }
  }

  SUBCASE("all-zero weights raise a degeneracy error") {
    systems::KitagawaParams kp;
    kp.sigma_v = 1e-4;
    auto sys = systems::kitagawa_system(kp);
    filters::ParticleCloud cloud;
    cloud.particles = Eigen::MatrixXd::Constant(20, 1, 0.0);
    Rng rng(5);
    CHECK_THROWS_AS(
        filters::sir_pf_step(sys, cloud, {}, Eigen::VectorXd::Constant(1, 1000.0), rng),
        DegeneracyError);
  }
}

TEST_CASE("run_filter") {
  const auto sys = test_linear_2d();
  const GaussianBelief prior(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0).asDiagonal());

  SUBCASE("empty measurement list yields only the prior") {
    const auto series = filters::run_filter(filters::EkfFilter(sys), prior,
                                            Eigen::MatrixXd(0, 1), Eigen::MatrixXd(0, 0));
    CHECK(series.filtered.size() == 1);
    CHECK(series.joints.empty());
    CHECK(series.filtered[0].mean == prior.mean);
  }

  SUBCASE("step errors carry the time index") {
    Eigen::MatrixXd A(1, 1), C(1, 1);
    A << 1.0;
    C << 1.0;
    const auto degenerate =
        systems::linear_system(A, C, Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1));
    const GaussianBelief p0(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1));
    try {
      filters::run_filter(filters::UkfFilter(degenerate), p0, Eigen::MatrixXd::Zero(3, 1),
                          Eigen::MatrixXd(3, 0));
      FAIL("expected ConditioningError");
    } catch (const ConditioningError& e) {
      CHECK(std::string(e.what()).find("time step") != std::string::npos);
    }
  }

  SUBCASE("pendulum run keeps every record PSD-valid") {
    const auto psys = systems::pendulum_system();
    const auto traj = systems::simulate(psys, systems::pendulum_prior(), 30, 99);
    const auto series = filters::run_filter(filters::UkfFilter(psys), systems::pendulum_prior(),
                                            traj.measurements, traj.controls);
    CHECK(series.records.size() == 30);
    for (const auto& rec : series.records) {
      CHECK(min_eigenvalue(rec.filtered.cov) >= -1e-9);
      CHECK(min_eigenvalue(rec.predicted.cov - rec.filtered.cov) >= -1e-8);
    }
  }

  SUBCASE("particle run is bitwise reproducible for a fixed seed") {
    const auto traj = systems::simulate(sys, prior, 10, 7);
    const auto a = filters::run_particle_filter(sys, 500, prior, traj.measurements,
                                                traj.controls, 1234);
    const auto b = filters::run_particle_filter(sys, 500, prior, traj.measurements,
                                                traj.controls, 1234);
    for (std::size_t i = 0; i < a.filtered.size(); ++i) {
      CHECK((a.filtered[i].mean - b.filtered[i].mean).cwiseAbs().maxCoeff() == 0.0);
      CHECK((a.filtered[i].cov - b.filtered[i].cov).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}
