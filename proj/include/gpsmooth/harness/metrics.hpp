#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gpsmooth/core/belief.hpp"

namespace gpsmooth::harness {

// Negative log density of the truth under the belief (multivariate Gaussian).
double metric_nll(const GaussianBelief& belief, const Eigen::VectorXd& truth);

// Welford accumulator; the streaming side of the aggregation contract.
class RunningStats {
 public:
  void push(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  // 1.96 * sample std / sqrt(runs): the 95% interval half-width.
  double stderr95() const {
    return n_ > 0 ? 1.96 * stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MetricsRow {
  std::string estimator;
  double rmse = 0.0, mae = 0.0, nll = 0.0;
  double rmse_se95 = 0.0, mae_se95 = 0.0, nll_se95 = 0.0;
  int runs = 0;      // completed runs behind the averages
  int failures = 0;  // aborted runs (divergence, degeneracy), never dropped silently
};

}  // namespace gpsmooth::harness
