#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "gpsmooth/core/belief.hpp"
#include "gpsmooth/core/rng.hpp"

namespace gpsmooth::systems {

// Ground-truth dynamic system with additive Gaussian noise:
//   x_t = f(x_{t-1}, u_{t-1}) + w,   z_t = g(x_t) + v.
// Noise covariances are diagonal. Jacobians are with respect to the state.
struct AnalyticSystem {
  std::string name;
  Eigen::Index state_dim = 0;
  Eigen::Index meas_dim = 0;
  Eigen::Index control_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> f;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> f_jac;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g_jac;
  Eigen::MatrixXd process_noise;  // D x D
  Eigen::MatrixXd meas_noise;     // E x E
  std::function<Eigen::VectorXd(Rng&)> sample_control;  // unset when control_dim == 0
};

// One simulated run. Bitwise reproducible from (system params, seed): the
// generator draws, in order, x_0, then per step control / process noise /
// measurement noise.
struct Trajectory {
  Eigen::MatrixXd states;        // (T+1) x D, row 0 is x_0
  Eigen::MatrixXd measurements;  // T x E, row t-1 is z_t
  Eigen::MatrixXd controls;      // T x U, row t-1 is u_{t-1} (0 columns if no control)
  std::uint64_t seed = 0;
};

Eigen::VectorXd sample_gaussian(Rng& rng, const GaussianBelief& belief);

Trajectory simulate(const AnalyticSystem& system, const GaussianBelief& prior, int steps,
                    std::uint64_t seed);

// Inputs/targets for the transition GP and the measurement GP. The transition
// inputs carry the control as trailing columns when the system has one.
struct TrainingSet {
  Eigen::MatrixXd f_inputs;   // n x (D+U)
  Eigen::MatrixXd f_targets;  // n x D
  Eigen::MatrixXd g_inputs;   // n x D
  Eigen::MatrixXd g_targets;  // n x E
};

}  // namespace gpsmooth::systems
