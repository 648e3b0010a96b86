#pragma once

#include <Eigen/Dense>

#include "gpsmooth/core/errors.hpp"

namespace gpsmooth::gp {

// Squared-exponential kernel hyperparameters for one target dimension:
// signal variance, per-input-dimension length-scales, and the noise variance
// of the additive observation noise on that target.
struct SEHyperparams {
  double signal_variance = 1.0;
  Eigen::VectorXd length_scales;
  double noise_variance = 0.01;

  Eigen::Index input_dim() const { return length_scales.size(); }

  void validate() const {
    if (!(signal_variance > 0.0)) throw ContractError("signal_variance must be positive");
    if (!(noise_variance > 0.0)) throw ContractError("noise_variance must be positive");
    if (length_scales.size() == 0) throw ContractError("length_scales must be non-empty");
    for (Eigen::Index d = 0; d < length_scales.size(); ++d) {
      if (!(length_scales[d] > 0.0)) throw ContractError("length_scales must be positive");
    }
  }
};

}  // namespace gpsmooth::gp
