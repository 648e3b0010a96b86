#pragma once

#include "gpsmooth/systems/system.hpp"

namespace gpsmooth::systems {

// Linear-Gaussian system x' = A x + w, z = C x + v with exact Jacobians;
// the oracle bed for filter/smoother equivalence checks.
AnalyticSystem linear_system(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                             const Eigen::MatrixXd& process_noise,
                             const Eigen::MatrixXd& meas_noise);

TrainingSet make_linear_training(int n, const AnalyticSystem& sys, double region_lo,
                                 double region_hi, std::uint64_t seed);

}  // namespace gpsmooth::systems
