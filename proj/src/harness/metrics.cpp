#include "gpsmooth/harness/metrics.hpp"

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/core/psd.hpp"

namespace gpsmooth::harness {

double metric_nll(const GaussianBelief& belief, const Eigen::VectorXd& truth) {
  if (truth.size() != belief.dim()) throw ContractError("metric_nll: dimension mismatch");
  const PsdFactor f = factor_psd(belief.cov, "nll covariance");
  const Eigen::VectorXd resid = truth - belief.mean;
  const double quad = resid.dot(f.solve(resid));
  return 0.5 * (quad + f.log_det() + static_cast<double>(belief.dim()) * std::log(2.0 * M_PI));
}

}  // namespace gpsmooth::harness
