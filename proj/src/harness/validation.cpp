#include "gpsmooth/harness/validation.hpp"

#include <future>

#include "gpsmooth/core/rng.hpp"
#include "gpsmooth/filters/filters.hpp"
#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/mm/moment_match.hpp"
#include "gpsmooth/smoothers/smoothers.hpp"
#include "gpsmooth/systems/linear.hpp"

namespace gpsmooth::harness {

KalmanReference reference_kalman(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                 const GaussianBelief& prior,
                                 const Eigen::MatrixXd& measurements) {
  KalmanReference ref;
  ref.filtered.push_back(prior);
  Eigen::VectorXd mu = prior.mean;
  Eigen::MatrixXd P = prior.cov;
  const Eigen::Index D = mu.size();
  for (Eigen::Index t = 0; t < measurements.rows(); ++t) {
    const Eigen::VectorXd mu_pred = A * mu;
    const Eigen::MatrixXd P_pred = A * P * A.transpose() + Q;
    ref.predicted.emplace_back(mu_pred, P_pred);
    const Eigen::MatrixXd S = C * P_pred * C.transpose() + R;
    const Eigen::MatrixXd K = P_pred * C.transpose() * S.inverse();
    mu = mu_pred + K * (measurements.row(t).transpose() - C * mu_pred);
    P = (Eigen::MatrixXd::Identity(D, D) - K * C) * P_pred;
    P = 0.5 * (P + P.transpose());
    ref.filtered.emplace_back(mu, P);
  }
  return ref;
}

std::vector<GaussianBelief> reference_rts(const Eigen::MatrixXd& A,
                                          const KalmanReference& forward) {
  const std::size_t T = forward.filtered.size();
  std::vector<GaussianBelief> smoothed(T);
  smoothed[T - 1] = forward.filtered[T - 1];
  for (std::size_t t = T - 1; t-- > 0;) {
    const GaussianBelief& f = forward.filtered[t];
    const GaussianBelief& pred = forward.predicted[t];
    const Eigen::MatrixXd J = f.cov * A.transpose() * pred.cov.inverse();
    const Eigen::VectorXd mu = f.mean + J * (smoothed[t + 1].mean - pred.mean);
    const Eigen::MatrixXd P =
        f.cov + J * (smoothed[t + 1].cov - pred.cov) * J.transpose();
    smoothed[t] = GaussianBelief(mu, P);
  }
  return smoothed;
}

// ---------------------------------------------------------------------------
// Monte-Carlo oracle

std::vector<McComparison> mc_check_moments(const gp::GPModel& model, const GaussianBelief& belief,
                                           int samples, std::uint64_t seed) {
  const Eigen::Index n = model.size();
  const Eigen::Index D = model.input_dim();
  const Eigen::Index E = model.output_dim();

  // Direct dense posterior pieces, independent of the library's cached
  // factorizations: explicit kernel construction and explicit inverse.
  std::vector<Eigen::MatrixXd> scaled_inputs(static_cast<size_t>(E));
  std::vector<Eigen::VectorXd> input_norms(static_cast<size_t>(E));
  std::vector<Eigen::MatrixXd> kinv(static_cast<size_t>(E));
  std::vector<Eigen::VectorXd> beta(static_cast<size_t>(E));
  for (Eigen::Index a = 0; a < E; ++a) {
    const auto& hp = model.hyperparams(a);
    Eigen::MatrixXd SX = model.inputs();
    for (Eigen::Index d = 0; d < D; ++d) SX.col(d) /= hp.length_scales[d];
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        K(i, j) = hp.signal_variance *
                  std::exp(-0.5 * (SX.row(i) - SX.row(j)).squaredNorm());
      }
    }
    K.diagonal().array() += hp.noise_variance;
    kinv[static_cast<size_t>(a)] = K.inverse();
    beta[static_cast<size_t>(a)] = kinv[static_cast<size_t>(a)] * model.targets().col(a);
    input_norms[static_cast<size_t>(a)] = SX.rowwise().squaredNorm();
    scaled_inputs[static_cast<size_t>(a)] = std::move(SX);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(belief.cov);
  const Eigen::MatrixXd sqrt_cov =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Eigen::MatrixXd xs(samples, D);
  Eigen::MatrixXd ys(samples, E);
  Rng rng(seed);
  const int block = 2048;
  for (int start = 0; start < samples; start += block) {
    const int b = std::min(block, samples - start);
    Eigen::MatrixXd normals(b, D);
    for (int i = 0; i < b; ++i) {
      for (Eigen::Index d = 0; d < D; ++d) normals(i, d) = rng.normal();
    }
    const Eigen::MatrixXd P =
        (normals * sqrt_cov.transpose()).rowwise() + belief.mean.transpose();
    xs.middleRows(start, b) = P;
    for (Eigen::Index a = 0; a < E; ++a) {
      const auto& hp = model.hyperparams(a);
      Eigen::MatrixXd SP = P;
      for (Eigen::Index d = 0; d < D; ++d) SP.col(d) /= hp.length_scales[d];
      Eigen::MatrixXd d2 =
          -2.0 * scaled_inputs[static_cast<size_t>(a)] * SP.transpose();  // n x b
      d2.colwise() += input_norms[static_cast<size_t>(a)];
      d2.rowwise() += SP.rowwise().squaredNorm().transpose();
      const Eigen::MatrixXd kstar =
          (hp.signal_variance * (-0.5 * d2.array()).exp()).matrix();
      const Eigen::VectorXd m = kstar.transpose() * beta[static_cast<size_t>(a)];
      const Eigen::MatrixXd g = kinv[static_cast<size_t>(a)] * kstar;
      const Eigen::VectorXd v =
          (hp.signal_variance - kstar.cwiseProduct(g).colwise().sum().array())
              .cwiseMax(0.0)
              .matrix();
      for (int i = 0; i < b; ++i) {
        ys(start + i, a) = m[i] + std::sqrt(v[i]) * rng.normal();
      }
    }
  }

  // Analytic side (no observation noise: the oracle samples function values).
  const mm::PropagatedMoments analytic = mm::propagate(model, belief, std::nullopt);

  const double s = static_cast<double>(samples);
  const Eigen::RowVectorXd y_mean = ys.colwise().mean();
  const Eigen::RowVectorXd x_mean = xs.colwise().mean();
  Eigen::MatrixXd yc = ys.rowwise() - y_mean;
  Eigen::MatrixXd xc = xs.rowwise() - x_mean;

  std::vector<McComparison> out;
  auto add = [&](const std::string& quantity, double an, double est, double se) {
    McComparison c;
    c.quantity = quantity;
    c.analytic = an;
    c.estimate = est;
    c.standard_error = std::max(se, 1e-300);
    c.z = std::abs(an - est) / c.standard_error;
    out.push_back(std::move(c));
  };

  for (Eigen::Index a = 0; a < E; ++a) {
    const double se = std::sqrt(yc.col(a).squaredNorm() / (s - 1.0)) / std::sqrt(s);
    add("mean[" + std::to_string(a) + "]", analytic.mean[a], y_mean[a], se);
  }
  for (Eigen::Index a = 0; a < E; ++a) {
    for (Eigen::Index b2 = a; b2 < E; ++b2) {
      const Eigen::ArrayXd prod = yc.col(a).array() * yc.col(b2).array();
      const double est = prod.mean();
      const double se = std::sqrt((prod - est).square().sum() / (s - 1.0)) / std::sqrt(s);
      add("cov[" + std::to_string(a) + "," + std::to_string(b2) + "]", analytic.cov(a, b2), est,
          se);
    }
  }
  for (Eigen::Index d = 0; d < D; ++d) {
    for (Eigen::Index a = 0; a < E; ++a) {
      const Eigen::ArrayXd prod = xc.col(d).array() * yc.col(a).array();
      const double est = prod.mean();
      const double se = std::sqrt((prod - est).square().sum() / (s - 1.0)) / std::sqrt(s);
      add("cross[" + std::to_string(d) + "," + std::to_string(a) + "]",
          analytic.cross_cov(d, a), est, se);
    }
  }
  return out;
}

McInstance random_mc_instance(std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index D = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
  const Eigen::Index E = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
  const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.next_u64() % 26);
  const double spread = rng.uniform(0.5, 2.0);

  Eigen::MatrixXd X(n, D);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < D; ++d) X(i, d) = spread * rng.normal();
  }
  std::vector<gp::SEHyperparams> hps;
  Eigen::MatrixXd Y(n, E);
  for (Eigen::Index a = 0; a < E; ++a) {
    gp::SEHyperparams hp;
    hp.length_scales.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) hp.length_scales[d] = spread * rng.uniform(0.5, 2.0);
    hp.signal_variance = rng.uniform(0.5, 4.0);
    hp.noise_variance = rng.uniform(1e-4, 0.05);
    // Targets drawn from the GP prior implied by the hyperparameters.
    Eigen::MatrixXd K = gp::gram_matrix(X, hp, false);
    K.diagonal().array() += 1e-10;
    const Eigen::LLT<Eigen::MatrixXd> llt(K);
    Y.col(a) = llt.matrixL() * rng.normal_vector(n) +
               std::sqrt(hp.noise_variance) * rng.normal_vector(n);
    hps.push_back(std::move(hp));
  }

  Eigen::VectorXd mu(D);
  for (Eigen::Index d = 0; d < D; ++d) mu[d] = 0.5 * spread * rng.normal();
  Eigen::MatrixXd W(D, D);
  for (Eigen::Index i = 0; i < D; ++i) {
    for (Eigen::Index j = 0; j < D; ++j) W(i, j) = rng.normal();
  }
  const double cov_scale = rng.uniform(0.1, 0.8) * spread;
  const Eigen::MatrixXd cov =
      cov_scale * cov_scale / static_cast<double>(D) * (W * W.transpose()) +
      1e-6 * Eigen::MatrixXd::Identity(D, D);

  return McInstance{gp::GPModel::fit(std::move(X), std::move(Y), std::move(hps)),
                    GaussianBelief(mu, cov)};
}

McSuiteResult mc_moment_suite(int instances, int samples, std::uint64_t seed) {
  McSuiteResult res;
  for (int k = 0; k < instances; ++k) {
    const McInstance inst = random_mc_instance(derive_seed(seed, 0xA000 + static_cast<std::uint64_t>(k)));
    const auto comps =
        mc_check_moments(inst.model, inst.belief, samples,
                         derive_seed(seed, 0xB000 + static_cast<std::uint64_t>(k)));
    for (const auto& c : comps) {
      ++res.comparisons;
      if (c.z <= 3.0) ++res.within3;
      res.worst_z = std::max(res.worst_z, c.z);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Linear-system equivalence checks

namespace {

double max_belief_dev(const std::vector<GaussianBelief>& a, const std::vector<GaussianBelief>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a[i].mean - b[i].mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[i].cov - b[i].cov).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> linear_sanity_checks(std::uint64_t seed, int gp_training_points,
                                              int gp_restarts) {
  std::vector<CheckResult> checks;

  // 2-D system exercises the matrix paths of every analytic filter.
  Eigen::MatrixXd A(2, 2), C(1, 2), Q(2, 2), R(1, 1);
  A << 0.9, 0.1, 0.0, 0.8;
  C << 1.0, 0.5;
  Q = Eigen::Vector2d(0.01, 0.02).asDiagonal();
  R << 0.01;
  const systems::AnalyticSystem sys = systems::linear_system(A, C, Q, R);
  const GaussianBelief prior(Eigen::Vector2d(0.3, -0.2),
                             Eigen::Vector2d(0.5, 0.5).asDiagonal());
  const systems::Trajectory traj = systems::simulate(sys, prior, 20, derive_seed(seed, 1));
  const KalmanReference kal = reference_kalman(A, C, Q, R, prior, traj.measurements);
  const std::vector<GaussianBelief> rts = reference_rts(A, kal);

  auto check_pair = [&](const std::string& name, const smoothers::EstimateSeries& series,
                        double tol) {
    checks.push_back({name + " max dev vs kalman", max_belief_dev(series.filtered, kal.filtered),
                      tol, false});
    checks.push_back({name + " smoother max dev vs rts", max_belief_dev(series.smoothed, rts),
                      tol, false});
  };

  {
    auto s = smoothers::eks(sys, prior, traj.measurements, traj.controls);
    check_pair("ekf/eks", s, 1e-10);
  }
  {
    auto s = smoothers::urtss(sys, prior, traj.measurements, traj.controls);
    check_pair("ukf/urtss", s, 1e-10);
  }
  {
    auto s = smoothers::cks(sys, prior, traj.measurements, traj.controls);
    check_pair("ckf/cks", s, 1e-10);
  }

  // 1-D system (a=0.9, c=1, small noise) for the learned filter/smoother.
  {
    Eigen::MatrixXd A1(1, 1), C1(1, 1), Q1(1, 1), R1(1, 1);
    A1 << 0.9;
    C1 << 1.0;
    Q1 << 0.01;
    R1 << 0.01;
    const systems::AnalyticSystem lin = systems::linear_system(A1, C1, Q1, R1);
    const systems::TrainingSet ts =
        systems::make_linear_training(gp_training_points, lin, -3.0, 3.0, derive_seed(seed, 2));
    gp::TrainOptions opts;
    opts.restarts = gp_restarts;
    auto fut_f = std::async(std::launch::async, [&] {
      return gp::train_gp(ts.f_inputs, ts.f_targets, opts, derive_seed(seed, 3));
    });
    gp::GPModel gp_g = gp::train_gp(ts.g_inputs, ts.g_targets, opts, derive_seed(seed, 4));
    auto learned = std::make_shared<const filters::LearnedSystem>(
        filters::LearnedSystem{fut_f.get(), std::move(gp_g)});

    const GaussianBelief prior1(Eigen::VectorXd::Constant(1, 1.0),
                                Eigen::MatrixXd::Constant(1, 1, 0.25));
    const systems::Trajectory traj1 = systems::simulate(lin, prior1, 20, derive_seed(seed, 5));
    const KalmanReference kal1 = reference_kalman(A1, C1, Q1, R1, prior1, traj1.measurements);
    const std::vector<GaussianBelief> rts1 = reference_rts(A1, kal1);

    const filters::GpAdfFilter adf(learned);
    smoothers::EstimateSeries series =
        filters::run_filter(adf, prior1, traj1.measurements, traj1.controls);
    smoothers::rts_backward(series);
    checks.push_back({"gp-adf max dev vs kalman (dense training)",
                      max_belief_dev(series.filtered, kal1.filtered), 5e-2, false});
    checks.push_back({"gp-rtss max dev vs rts (dense training)",
                      max_belief_dev(series.smoothed, rts1), 5e-2, false});
  }

  for (auto& c : checks) c.pass = c.value <= c.threshold;
  return checks;
}

}  // namespace gpsmooth::harness
