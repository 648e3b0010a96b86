#include "gpsmooth/smoothers/smoothers.hpp"

#include "gpsmooth/core/errors.hpp"

namespace gpsmooth::smoothers {

void rts_backward(EstimateSeries& series) {
  const std::size_t T = series.filtered.size();
  if (T == 0) throw ContractError("rts_backward: empty series");
  if (!series.has_joints || series.joints.size() + 1 != T) {
    throw ContractError("rts_backward: joints missing or inconsistent with filtered beliefs");
  }
  series.smoothed.assign(T, GaussianBelief{});
  series.gains.assign(series.joints.size(), Eigen::MatrixXd{});
  series.smoothed[T - 1] = series.filtered[T - 1];

  for (std::size_t t = series.joints.size(); t-- > 0;) {
    const JointGaussian& joint = series.joints[t];
    PsdFactor pred;
    try {
      pred = factor_psd(joint.cov_next, "smoother time-update covariance");
    } catch (const ConditioningError& e) {
      throw ConditioningError(std::string(e.what()) + " (time step " + std::to_string(t + 1) + ")");
    }
    // J = cross * cov_next^-1, innovating against the time-update moments.
    const Eigen::MatrixXd gain = pred.solve(Eigen::MatrixXd(joint.cross.transpose())).transpose();
    const GaussianBelief& next_smoothed = series.smoothed[t + 1];
    const Eigen::VectorXd mean =
        series.filtered[t].mean + gain * (next_smoothed.mean - joint.mean_next);
    const Eigen::MatrixXd cov =
        series.filtered[t].cov +
        gain * (next_smoothed.cov - joint.cov_next) * gain.transpose();
    series.smoothed[t] = GaussianBelief(mean, cov);
    series.gains[t] = gain;
  }
}

EstimateSeries gp_rtss(const filters::LearnedSystem& system, const GaussianBelief& prior,
                       const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls) {
  const filters::GpAdfFilter filter(std::make_shared<const filters::LearnedSystem>(system));
  EstimateSeries series = filters::run_filter(filter, prior, measurements, controls);
  rts_backward(series);
  return series;
}

EstimateSeries eks(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                   const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls) {
  const filters::EkfFilter filter(system);
  EstimateSeries series = filters::run_filter(filter, prior, measurements, controls);
  rts_backward(series);
  return series;
}

EstimateSeries urtss(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                     const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls,
                     filters::UtParams params) {
  const filters::UkfFilter filter(system, params);
  EstimateSeries series = filters::run_filter(filter, prior, measurements, controls);
  rts_backward(series);
  return series;
}

EstimateSeries cks(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                   const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls) {
  const filters::CkfFilter filter(system);
  EstimateSeries series = filters::run_filter(filter, prior, measurements, controls);
  rts_backward(series);
  return series;
}

}  // namespace gpsmooth::smoothers
