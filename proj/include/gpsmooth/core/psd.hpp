#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace gpsmooth {

// Result of a positive-definite factorization attempt with the adaptive
// jitter ladder: jitter starts at 1e-10*trace/n and grows x10 until the
// factorization succeeds or 1e-4*trace/n is exceeded.
struct PsdFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;

  template <typename Derived>
  auto solve(const Eigen::MatrixBase<Derived>& rhs) const {
    return llt.solve(rhs);
  }
  double log_det() const {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
};

// Factorizes a symmetric matrix expected to be PD, applying the jitter ladder
// on failure. Throws ConditioningError (message includes `context`) if the
// ladder is exhausted.
PsdFactor factor_psd(const Eigen::MatrixXd& m, const std::string& context);

// Same, but reports failure via nullopt instead of throwing (training inner
// loop treats non-PD proposals as rejected line-search steps).
std::optional<PsdFactor> try_factor_psd(const Eigen::MatrixXd& m);

// (m + m^T)/2
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

double min_eigenvalue(const Eigen::MatrixXd& sym);

// Symmetrizes and floors negative eigenvalues at zero. `repair` returns the
// magnitude of the most negative eigenvalue removed (0 if none).
Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& m, double* repair = nullptr);

}  // namespace gpsmooth
