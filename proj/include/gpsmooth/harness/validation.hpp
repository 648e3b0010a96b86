#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gpsmooth/core/belief.hpp"
#include "gpsmooth/gp/model.hpp"

namespace gpsmooth::harness {

// --- Reference Kalman filter / RTS smoother -------------------------------
// Textbook closed forms with explicit inverses, written independently of the
// filters/smoothers modules they are used to check.

struct KalmanReference {
  std::vector<GaussianBelief> predicted;  // per measurement step
  std::vector<GaussianBelief> filtered;   // prior + per measurement step
};

KalmanReference reference_kalman(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                 const GaussianBelief& prior,
                                 const Eigen::MatrixXd& measurements);

std::vector<GaussianBelief> reference_rts(const Eigen::MatrixXd& A,
                                          const KalmanReference& forward);

// --- Monte-Carlo oracle for the moment-matched GP prediction --------------
// Samples the input AND the function (posterior mean/variance per sample via
// direct dense formulas, function value drawn from them), so model
// uncertainty is integrated out. Each scalar comparison is reported in units
// of its MC standard error.

struct McComparison {
  std::string quantity;  // "mean[a]", "cov[a,b]", "cross[d,a]"
  double analytic = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

std::vector<McComparison> mc_check_moments(const gp::GPModel& model, const GaussianBelief& belief,
                                           int samples, std::uint64_t seed);

// Random (model, belief) instance generator for the MC suite: D,E <= 3,
// n <= 30, targets drawn from a GP prior with the instance hyperparameters.
struct McInstance {
  gp::GPModel model;
  GaussianBelief belief;
};
McInstance random_mc_instance(std::uint64_t seed);

struct McSuiteResult {
  int comparisons = 0;
  int within3 = 0;
  double worst_z = 0.0;
  double fraction_within() const {
    return comparisons > 0 ? static_cast<double>(within3) / comparisons : 1.0;
  }
};

McSuiteResult mc_moment_suite(int instances, int samples, std::uint64_t seed);

// --- Check rows shared by `verify` and the acceptance suite ----------------

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Kalman/RTS equivalence of the analytic filters/smoothers (tol 1e-10) and of
// GP-ADF/GP-RTSS after dense training on a linear system (tol 5e-2).
std::vector<CheckResult> linear_sanity_checks(std::uint64_t seed, int gp_training_points = 500,
                                              int gp_restarts = 4);

}  // namespace gpsmooth::harness
