#pragma once

#include <vector>

#include "gpsmooth/filters/types.hpp"

namespace gpsmooth::smoothers {

// Beliefs over one trajectory. filtered[0] is the prior; each measurement
// appends one belief, so with M measurements there are M+1 filtered beliefs
// and M joints. smoothed/gains are filled by the backward pass (same length
// as filtered / joints); the last smoothed belief equals the last filtered.
struct EstimateSeries {
  std::vector<GaussianBelief> filtered;
  std::vector<GaussianBelief> smoothed;
  std::vector<JointGaussian> joints;
  std::vector<Eigen::MatrixXd> gains;
  std::vector<filters::FilterStepRecord> records;
  bool has_joints = true;  // particle runs carry no joints

  std::size_t steps() const { return records.size(); }
};

}  // namespace gpsmooth::smoothers
