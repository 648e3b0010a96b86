#pragma once

#include <Eigen/Dense>

#include "gpsmooth/core/belief.hpp"

namespace gpsmooth::filters {

// Everything one Gaussian filter step produces. joint_prev couples x_{t-1}
// and x_t through the time update and is what a smoother consumes; its
// cov_next/mean_next are the time-update moments.
struct FilterStepRecord {
  GaussianBelief predicted;       // p(x_t | z_{1:t-1})
  GaussianBelief predicted_meas;  // p(z_t | z_{1:t-1})
  Eigen::MatrixXd meas_cross;     // cov[x_t, z_t | z_{1:t-1}], D x E
  GaussianBelief filtered;        // p(x_t | z_{1:t})
  JointGaussian joint_prev;
  int repairs = 0;  // eigenvalue floors applied during this step
};

}  // namespace gpsmooth::filters
