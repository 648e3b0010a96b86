#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>

#include "gpsmooth/filters/types.hpp"
#include "gpsmooth/gp/model.hpp"
#include "gpsmooth/smoothers/series.hpp"
#include "gpsmooth/systems/system.hpp"

namespace gpsmooth::filters {

// Transition and measurement maps learned from data; the filter noise is the
// models' learned noise.
struct LearnedSystem {
  gp::GPModel gp_f;  // (x_{t-1}[, u_{t-1}]) -> x_t
  gp::GPModel gp_g;  // x_t -> z_t
};

// Symmetrize + floor negative eigenvalues; throws UnstableError if the floor
// magnitude exceeds 1e-6 * trace (divergence must not be masked).
Eigen::MatrixXd repair_covariance(const Eigen::MatrixXd& cov, int* repair_counter,
                                  const std::string& where);

class GaussianStepper {
 public:
  virtual ~GaussianStepper() = default;
  virtual FilterStepRecord step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                                const Eigen::VectorXd& z) const = 0;
  virtual std::string name() const = 0;
};

// Analytic moment-matching filter for learned GP dynamics.
class GpAdfFilter : public GaussianStepper {
 public:
  explicit GpAdfFilter(std::shared_ptr<const LearnedSystem> system);
  FilterStepRecord step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                        const Eigen::VectorXd& z) const override;
  std::string name() const override { return "gp-adf"; }
  const LearnedSystem& system() const { return *system_; }

 private:
  std::shared_ptr<const LearnedSystem> system_;
};

FilterStepRecord gp_adf_step(const LearnedSystem& system, const GaussianBelief& prior,
                             const Eigen::VectorXd& control, const Eigen::VectorXd& z);

class EkfFilter : public GaussianStepper {
 public:
  explicit EkfFilter(systems::AnalyticSystem system) : system_(std::move(system)) {}
  FilterStepRecord step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                        const Eigen::VectorXd& z) const override;
  std::string name() const override { return "ekf"; }

 private:
  systems::AnalyticSystem system_;
};

struct UtParams {
  double alpha = 1.0;
  double beta = 0.0;
  double kappa = 2.0;
};

class UkfFilter : public GaussianStepper {
 public:
  UkfFilter(systems::AnalyticSystem system, UtParams params = {})
      : system_(std::move(system)), params_(params) {}
  FilterStepRecord step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                        const Eigen::VectorXd& z) const override;
  std::string name() const override { return "ukf"; }

 private:
  systems::AnalyticSystem system_;
  UtParams params_;
};

// Propagates a Gaussian through `fn` with the unscented transform; returns
// mean, covariance (before additive noise) and input-output cross-covariance.
struct TransformResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cross;
};
TransformResult unscented_transform(const GaussianBelief& in,
                                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                    Eigen::Index out_dim, const UtParams& params);
TransformResult cubature_transform(const GaussianBelief& in,
                                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                   Eigen::Index out_dim);

class CkfFilter : public GaussianStepper {
 public:
  explicit CkfFilter(systems::AnalyticSystem system) : system_(std::move(system)) {}
  FilterStepRecord step(const GaussianBelief& prior, const Eigen::VectorXd& control,
                        const Eigen::VectorXd& z) const override;
  std::string name() const override { return "ckf"; }

 private:
  systems::AnalyticSystem system_;
};

// Bootstrap SIR particle filter: propagate with sampled noise, weight by the
// measurement likelihood, systematic resampling every step. The returned
// belief moment-matches the weighted particles (for metric comparability).
struct ParticleCloud {
  Eigen::MatrixXd particles;  // N x D
};

GaussianBelief sir_pf_step(const systems::AnalyticSystem& system, ParticleCloud& cloud,
                           const Eigen::VectorXd& control, const Eigen::VectorXd& z, Rng& rng);

// Folds a stepper over a measurement sequence (controls row t drives step
// t -> t+1; pass a 0-column matrix when the system has no control). Errors
// thrown by a step are annotated with the time index.
smoothers::EstimateSeries run_filter(const GaussianStepper& stepper, const GaussianBelief& prior,
                                     const Eigen::MatrixXd& measurements,
                                     const Eigen::MatrixXd& controls);

smoothers::EstimateSeries run_particle_filter(const systems::AnalyticSystem& system,
                                              int num_particles, const GaussianBelief& prior,
                                              const Eigen::MatrixXd& measurements,
                                              const Eigen::MatrixXd& controls, std::uint64_t seed);

}  // namespace gpsmooth::filters
