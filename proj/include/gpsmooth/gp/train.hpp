#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gpsmooth/gp/model.hpp"

namespace gpsmooth::gp {

// log p(y | X, theta) for one target dimension, with its analytic gradient in
// log-parameter space. Parameter order: [log l_1, ..., log l_D, log alpha,
// log sigma] (standard deviations, not variances).
struct Evidence {
  double value = 0.0;
  Eigen::VectorXd grad;
};

Evidence log_evidence(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const SEHyperparams& hp);

struct TrainOptions {
  int restarts = 10;
  int max_iters = 150;
  double grad_tol = 1e-6;
};

// Evidence maximization per target dimension: L-BFGS on log-parameters from
// `restarts` initializations (first one data-scaled, the rest log-uniform in
// [1e-2, 1e1] times data scale), keeping the best optimum. Dimensions do not
// share hyperparameters.
GPModel train_gp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const TrainOptions& opts,
                 std::uint64_t seed);

// Best hyperparameters and achieved evidence for a single target dimension.
struct TrainedDim {
  SEHyperparams hp;
  double evidence = 0.0;
};

TrainedDim train_single_dim(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const TrainOptions& opts, std::uint64_t seed);

}  // namespace gpsmooth::gp
