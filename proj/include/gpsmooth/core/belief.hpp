#pragma once

#include <Eigen/Dense>

#include "gpsmooth/core/psd.hpp"

namespace gpsmooth {

// Gaussian over a latent state or a measurement at one time step. The
// covariance is symmetrized on construction and floored if an eigenvalue
// drops below -1e-9 * ||cov||.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianBelief() = default;
  GaussianBelief(Eigen::VectorXd mu, const Eigen::MatrixXd& sigma) : mean(std::move(mu)) {
    cov = symmetrized(sigma);
    const double scale = cov.norm();
    if (scale > 0.0 && min_eigenvalue(cov) < -1e-9 * scale) {
      cov = floor_psd(cov);
    }
  }

  Eigen::Index dim() const { return mean.size(); }
};

// Joint Gaussian over two consecutive states; the coupling a smoother needs.
struct JointGaussian {
  Eigen::VectorXd mean_prev;
  Eigen::VectorXd mean_next;
  Eigen::MatrixXd cov_prev;
  Eigen::MatrixXd cov_next;
  Eigen::MatrixXd cross;  // cov[x_prev, x_next]

  Eigen::MatrixXd assembled() const {
    const Eigen::Index d = mean_prev.size();
    Eigen::MatrixXd block(2 * d, 2 * d);
    block.topLeftCorner(d, d) = cov_prev;
    block.topRightCorner(d, d) = cross;
    block.bottomLeftCorner(d, d) = cross.transpose();
    block.bottomRightCorner(d, d) = cov_next;
    return block;
  }
};

}  // namespace gpsmooth
