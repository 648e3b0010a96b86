#include "gpsmooth/filters/filters.hpp"

#include <cmath>

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/mm/moment_match.hpp"

namespace gpsmooth::filters {

Eigen::MatrixXd repair_covariance(const Eigen::MatrixXd& cov, int* repair_counter,
                                  const std::string& where) {
  double repair = 0.0;
  Eigen::MatrixXd fixed = floor_psd(cov, &repair);
  if (repair > 0.0) {
    const double trace = std::max(fixed.trace(), 1e-300);
    if (repair > 1e-6 * trace) {
      throw UnstableError("covariance repair " + std::to_string(repair) + " exceeds 1e-6*trace in " +
                          where);
    }
    if (repair_counter) ++(*repair_counter);
  }
  return fixed;
}

namespace {

// Innovation update shared by every Gaussian filter:
//   mu = mu- + C S^-1 (z - mz),  Sigma = Sigma- - C S^-1 C'.
void innovation_update(const GaussianBelief& predicted, const GaussianBelief& pred_meas,
                       const Eigen::MatrixXd& cross, const Eigen::VectorXd& z,
                       FilterStepRecord& rec) {
  const PsdFactor s = factor_psd(pred_meas.cov, "innovation covariance");
  const Eigen::MatrixXd gain_t = s.solve(Eigen::MatrixXd(cross.transpose()));  // E x D
  const Eigen::VectorXd mean = predicted.mean + gain_t.transpose() * (z - pred_meas.mean);
  Eigen::MatrixXd cov = predicted.cov - cross * gain_t;
  cov = repair_covariance(cov, &rec.repairs, "measurement update");
  rec.predicted = predicted;
  rec.predicted_meas = pred_meas;
  rec.meas_cross = cross;
  rec.filtered = GaussianBelief(mean, cov);
}

}  // namespace

// ---------------------------------------------------------------------------
// GP-ADF

GpAdfFilter::GpAdfFilter(std::shared_ptr<const LearnedSystem> system)
    : system_(std::move(system)) {
  const Eigen::Index D = system_->gp_f.output_dim();
  if (system_->gp_g.input_dim() != D) {
    throw ContractError("GpAdfFilter: gp_g input dimension must equal state dimension");
  }
  if (system_->gp_f.input_dim() < D) {
    throw ContractError("GpAdfFilter: gp_f input dimension must cover the state");
  }
}

FilterStepRecord gp_adf_step(const LearnedSystem& system, const GaussianBelief& prior,
                             const Eigen::VectorXd& control, const Eigen::VectorXd& z) {
  const Eigen::Index D = system.gp_f.output_dim();
  const Eigen::Index U = system.gp_f.input_dim() - D;
  if (control.size() != U) throw ContractError("gp_adf_step: control dimension mismatch");

  // Time update: append the (deterministic) control to the input belief.
  GaussianBelief input = prior;
  if (U > 0) {
    Eigen::VectorXd mean(D + U);
    mean << prior.mean, control;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(D + U, D + U);
    cov.topLeftCorner(D, D) = prior.cov;
    input = GaussianBelief(mean, cov);
  }
  const mm::PropagatedMoments tm =
      mm::propagate(system.gp_f, input, system.gp_f.noise_variances());

  FilterStepRecord rec;
  const GaussianBelief predicted(tm.mean,
                                 repair_covariance(tm.cov, &rec.repairs, "gp-adf time update"));

  // Measurement moments through the observation GP.
  const mm::PropagatedMoments mm_meas =
      mm::propagate(system.gp_g, predicted, system.gp_g.noise_variances());
  const GaussianBelief pred_meas(
      mm_meas.mean, repair_covariance(mm_meas.cov, &rec.repairs, "gp-adf measurement moments"));

  innovation_update(predicted, pred_meas, mm_meas.cross_cov, z, rec);
  rec.joint_prev = JointGaussian{prior.mean, predicted.mean, prior.cov, predicted.cov,
                                 tm.cross_cov.topRows(D)};
  return rec;
}

FilterStepRecord GpAdfFilter::step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                                   const Eigen::VectorXd& z) const {
  return gp_adf_step(*system_, prior, control, z);
}

// ---------------------------------------------------------------------------
// EKF

FilterStepRecord EkfFilter::step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                                 const Eigen::VectorXd& z) const {
  FilterStepRecord rec;
  const Eigen::MatrixXd F = system_.f_jac(prior.mean, control);
  const Eigen::VectorXd pred_mean = system_.f(prior.mean, control);
  Eigen::MatrixXd pred_cov = F * prior.cov * F.transpose() + system_.process_noise;
  pred_cov = repair_covariance(pred_cov, &rec.repairs, "ekf time update");
  const GaussianBelief predicted(pred_mean, pred_cov);

  const Eigen::MatrixXd G = system_.g_jac(predicted.mean);
  const Eigen::VectorXd mz = system_.g(predicted.mean);
  const Eigen::MatrixXd sz = G * predicted.cov * G.transpose() + system_.meas_noise;
  const Eigen::MatrixXd cross = predicted.cov * G.transpose();

  innovation_update(predicted, GaussianBelief(mz, sz), cross, z, rec);
  rec.joint_prev =
      JointGaussian{prior.mean, predicted.mean, prior.cov, predicted.cov,
                    prior.cov * F.transpose()};
  return rec;
}

// ---------------------------------------------------------------------------
// Sigma-point transforms

TransformResult unscented_transform(const GaussianBelief& in,
                                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                    Eigen::Index out_dim, const UtParams& p) {
  const Eigen::Index D = in.dim();
  const double lambda = p.alpha * p.alpha * (static_cast<double>(D) + p.kappa) - static_cast<double>(D);
  const double spread = static_cast<double>(D) + lambda;
  const PsdFactor chol = factor_psd(in.cov, "unscented transform input covariance");
  const Eigen::MatrixXd L = chol.llt.matrixL();

  const Eigen::Index npts = 2 * D + 1;
  Eigen::MatrixXd points(D, npts);
  points.col(0) = in.mean;
  for (Eigen::Index i = 0; i < D; ++i) {
    const Eigen::VectorXd offset = std::sqrt(spread) * L.col(i);
    points.col(1 + i) = in.mean + offset;
    points.col(1 + D + i) = in.mean - offset;
  }
  Eigen::VectorXd wm(npts), wc(npts);
  wm[0] = lambda / spread;
  wc[0] = wm[0] + (1.0 - p.alpha * p.alpha + p.beta);
  for (Eigen::Index i = 1; i < npts; ++i) wm[i] = wc[i] = 0.5 / spread;

  Eigen::MatrixXd mapped(out_dim, npts);
  for (Eigen::Index i = 0; i < npts; ++i) mapped.col(i) = fn(points.col(i));

  TransformResult res;
  res.mean = mapped * wm;
  res.cov = Eigen::MatrixXd::Zero(out_dim, out_dim);
  res.cross = Eigen::MatrixXd::Zero(D, out_dim);
  for (Eigen::Index i = 0; i < npts; ++i) {
    const Eigen::VectorXd dy = mapped.col(i) - res.mean;
    res.cov += wc[i] * dy * dy.transpose();
    res.cross += wc[i] * (points.col(i) - in.mean) * dy.transpose();
  }
  return res;
}

TransformResult cubature_transform(const GaussianBelief& in,
                                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                   Eigen::Index out_dim) {
  const Eigen::Index D = in.dim();
  const PsdFactor chol = factor_psd(in.cov, "cubature transform input covariance");
  const Eigen::MatrixXd L = chol.llt.matrixL();
  const double scale = std::sqrt(static_cast<double>(D));
  const double w = 1.0 / (2.0 * static_cast<double>(D));

  TransformResult res;
  res.mean = Eigen::VectorXd::Zero(out_dim);
  Eigen::MatrixXd points(D, 2 * D), mapped(out_dim, 2 * D);
  for (Eigen::Index i = 0; i < D; ++i) {
    points.col(i) = in.mean + scale * L.col(i);
    points.col(D + i) = in.mean - scale * L.col(i);
  }
  for (Eigen::Index i = 0; i < 2 * D; ++i) {
    mapped.col(i) = fn(points.col(i));
    res.mean += w * mapped.col(i);
  }
  res.cov = Eigen::MatrixXd::Zero(out_dim, out_dim);
  res.cross = Eigen::MatrixXd::Zero(D, out_dim);
  for (Eigen::Index i = 0; i < 2 * D; ++i) {
    const Eigen::VectorXd dy = mapped.col(i) - res.mean;
    res.cov += w * dy * dy.transpose();
    res.cross += w * (points.col(i) - in.mean) * dy.transpose();
  }
  return res;
}

namespace {

FilterStepRecord sigma_point_step(const systems::AnalyticSystem& system,
                                  const GaussianBelief& prior, const Eigen::VectorXd& control,
                                  const Eigen::VectorXd& z, bool cubature, const UtParams& params,
                                  const std::string& name) {
  FilterStepRecord rec;
  auto fwrap = [&](const Eigen::VectorXd& x) { return system.f(x, control); };
  const TransformResult tm = cubature
                                 ? cubature_transform(prior, fwrap, system.state_dim)
                                 : unscented_transform(prior, fwrap, system.state_dim, params);
  Eigen::MatrixXd pred_cov = tm.cov + system.process_noise;
  pred_cov = repair_covariance(pred_cov, &rec.repairs, name + " time update");
  const GaussianBelief predicted(tm.mean, pred_cov);

  auto gwrap = [&](const Eigen::VectorXd& x) { return system.g(x); };
  const TransformResult mm = cubature
                                 ? cubature_transform(predicted, gwrap, system.meas_dim)
                                 : unscented_transform(predicted, gwrap, system.meas_dim, params);
  Eigen::MatrixXd sz = mm.cov + system.meas_noise;
  sz = repair_covariance(sz, &rec.repairs, name + " measurement moments");

  innovation_update(predicted, GaussianBelief(mm.mean, sz), mm.cross, z, rec);
  rec.joint_prev = JointGaussian{prior.mean, predicted.mean, prior.cov, predicted.cov, tm.cross};
  return rec;
}

}  // namespace

FilterStepRecord UkfFilter::step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                                 const Eigen::VectorXd& z) const {
  return sigma_point_step(system_, prior, control, z, false, params_, "ukf");
}

FilterStepRecord CkfFilter::step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                                 const Eigen::VectorXd& z) const {
  return sigma_point_step(system_, prior, control, z, true, UtParams{}, "ckf");
}

// ---------------------------------------------------------------------------
// SIR particle filter

GaussianBelief sir_pf_step(const systems::AnalyticSystem& system, ParticleCloud& cloud,
                           const Eigen::VectorXd& control, const Eigen::VectorXd& z, Rng& rng) {
  const Eigen::Index N = cloud.particles.rows();
  const Eigen::Index D = system.state_dim;
  if (N < 2) throw ContractError("sir_pf_step: need at least two particles");

  const Eigen::VectorXd w_std = system.process_noise.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Eigen::VectorXd v_inv_var = system.meas_noise.diagonal().cwiseInverse();

  Eigen::VectorXd log_w(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    Eigen::VectorXd x = system.f(cloud.particles.row(i).transpose(), control);
    for (Eigen::Index d = 0; d < D; ++d) x[d] += w_std[d] * rng.normal();
    cloud.particles.row(i) = x.transpose();
    const Eigen::VectorXd resid = z - system.g(x);
    log_w[i] = -0.5 * resid.cwiseProduct(v_inv_var.cwiseProduct(resid)).sum();
  }
  const double max_log = log_w.maxCoeff();
  if (!(max_log > -700.0)) {
    throw DegeneracyError("sir_pf_step: all particle weights underflowed to zero");
  }
  Eigen::VectorXd w = (log_w.array() - max_log).exp();
  w /= w.sum();

  // Moment-match the weighted particles before resampling.
  const Eigen::VectorXd mean = cloud.particles.transpose() * w;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(D, D);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::VectorXd d = cloud.particles.row(i).transpose() - mean;
    cov += w[i] * d * d.transpose();
  }

  // Systematic resampling, unconditionally.
  Eigen::MatrixXd resampled(N, D);
  const double u0 = rng.uniform01() / static_cast<double>(N);
  double cum = w[0];
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double target = u0 + static_cast<double>(i) / static_cast<double>(N);
    while (cum < target && j + 1 < N) cum += w[++j];
    resampled.row(i) = cloud.particles.row(j);
  }
  cloud.particles = std::move(resampled);

  return GaussianBelief(mean, cov);
}

// ---------------------------------------------------------------------------
// Drivers

smoothers::EstimateSeries run_filter(const GaussianStepper& stepper, const GaussianBelief& prior,
                                     const Eigen::MatrixXd& measurements,
                                     const Eigen::MatrixXd& controls) {
  smoothers::EstimateSeries series;
  series.filtered.push_back(prior);
  GaussianBelief current = prior;
  for (Eigen::Index t = 0; t < measurements.rows(); ++t) {
    const Eigen::VectorXd u =
        controls.cols() > 0 ? Eigen::VectorXd(controls.row(t).transpose()) : Eigen::VectorXd(0);
    try {
      FilterStepRecord rec = stepper.step(current, u, measurements.row(t).transpose());
      current = rec.filtered;
      series.filtered.push_back(current);
      series.joints.push_back(rec.joint_prev);
      series.records.push_back(std::move(rec));
    } catch (const ConditioningError& e) {
      throw ConditioningError(std::string(e.what()) + " (time step " + std::to_string(t + 1) + ")");
    } catch (const UnstableError& e) {
      throw UnstableError(std::string(e.what()) + " (time step " + std::to_string(t + 1) + ")");
    }
  }
  return series;
}

smoothers::EstimateSeries run_particle_filter(const systems::AnalyticSystem& system,
                                              int num_particles, const GaussianBelief& prior,
                                              const Eigen::MatrixXd& measurements,
                                              const Eigen::MatrixXd& controls, std::uint64_t seed) {
  Rng rng(seed);
  ParticleCloud cloud;
  cloud.particles.resize(num_particles, system.state_dim);
  for (int i = 0; i < num_particles; ++i) {
    cloud.particles.row(i) = systems::sample_gaussian(rng, prior).transpose();
  }
  smoothers::EstimateSeries series;
  series.has_joints = false;
  series.filtered.push_back(prior);
  for (Eigen::Index t = 0; t < measurements.rows(); ++t) {
    const Eigen::VectorXd u =
        controls.cols() > 0 ? Eigen::VectorXd(controls.row(t).transpose()) : Eigen::VectorXd(0);
    try {
      FilterStepRecord rec;
      rec.filtered = sir_pf_step(system, cloud, u, measurements.row(t).transpose(), rng);
      series.filtered.push_back(rec.filtered);
      series.records.push_back(std::move(rec));
    } catch (const DegeneracyError& e) {
      throw DegeneracyError(std::string(e.what()) + " (time step " + std::to_string(t + 1) + ")");
    }
  }
  return series;
}

}  // namespace gpsmooth::filters
