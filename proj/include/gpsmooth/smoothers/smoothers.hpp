#pragma once

#include "gpsmooth/filters/filters.hpp"
#include "gpsmooth/smoothers/series.hpp"

namespace gpsmooth::smoothers {

// Backward Rauch-Tung-Striebel pass over the stored joints. Agnostic to how
// the joints were produced: each gain solves J = cross * cov_next^-1 against
// the time-update covariance (never forming the inverse), and the recursion
// innovates against the time-update moments. Fills smoothed and gains.
void rts_backward(EstimateSeries& series);

// Forward GP-ADF pass collecting the analytic joints, then rts_backward.
// Fully deterministic: no sampling, linearization, or quadrature anywhere.
EstimateSeries gp_rtss(const filters::LearnedSystem& system, const GaussianBelief& prior,
                       const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls);

EstimateSeries eks(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                   const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls);

EstimateSeries urtss(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                     const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls,
                     filters::UtParams params = {});

EstimateSeries cks(const systems::AnalyticSystem& system, const GaussianBelief& prior,
                   const Eigen::MatrixXd& measurements, const Eigen::MatrixXd& controls);

}  // namespace gpsmooth::smoothers
