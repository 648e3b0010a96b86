#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gpsmooth/core/belief.hpp"
#include "gpsmooth/gp/model.hpp"

namespace gpsmooth::mm {

// First two moments of a multi-output SE-GP posterior evaluated at a Gaussian
// input, with model uncertainty integrated out, plus the input-output
// cross-covariance.
struct PropagatedMoments {
  Eigen::VectorXd mean;       // E
  Eigen::MatrixXd cov;        // E x E
  Eigen::MatrixXd cross_cov;  // D x E, cov[input, output_a] per column
};

// Shared per-call scratch: the expected kernel values q_{a,i} under the input
// distribution, the S_a = Sigma + Lambda_a factorizations, and per-dimension
// precomputations reused by the covariance and cross-covariance.
struct Scratch {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;  // symmetrized on entry
  Eigen::MatrixXd zeta;   // n x D, x_i - mu
  Eigen::MatrixXd q;      // n x E, each q_{a,i} in (0, alpha_a^2]
  Eigen::MatrixXd log_q;  // n x E, q before exponentiation
  Eigen::MatrixXd quad;   // n x E, zeta_i' Lambda_a^-1 zeta_i
  std::vector<Eigen::MatrixXd> lam_inv_zeta;  // per dim: n x D rows zeta_i' Lambda_a^-1
  std::vector<PsdFactor> s_factor;            // per dim: Sigma + Lambda_a
  Eigen::VectorXd log_alpha2;
};

Scratch compute_q(const gp::GPModel& model, const GaussianBelief& belief);

Eigen::VectorXd predict_mean(const gp::GPModel& model, const Scratch& scratch);
Eigen::VectorXd predict_mean(const gp::GPModel& model, const GaussianBelief& belief);

// Full E x E output covariance. `noise` adds the given variances on the
// diagonal (pass the model's learned noise when propagating a state or
// measurement; nothing for noise-free function moments).
Eigen::MatrixXd predict_cov(const gp::GPModel& model, const Scratch& scratch,
                            const std::optional<Eigen::VectorXd>& noise);
Eigen::MatrixXd predict_cov(const gp::GPModel& model, const GaussianBelief& belief,
                            const std::optional<Eigen::VectorXd>& noise);

Eigen::MatrixXd cross_cov(const gp::GPModel& model, const Scratch& scratch);
Eigen::MatrixXd cross_cov(const gp::GPModel& model, const GaussianBelief& belief);

// Mean, covariance, and cross-covariance sharing one scratch.
PropagatedMoments propagate(const gp::GPModel& model, const GaussianBelief& belief,
                            const std::optional<Eigen::VectorXd>& noise);

}  // namespace gpsmooth::mm
