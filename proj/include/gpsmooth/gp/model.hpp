#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gpsmooth/core/psd.hpp"
#include "gpsmooth/gp/hyperparams.hpp"

namespace gpsmooth::gp {

// k_SE(x, x') = alpha^2 exp(-1/2 (x-x')^T Lambda^-1 (x-x')), noise excluded.
double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const SEHyperparams& hp);

// Gram matrix of the SE kernel over the rows of X; exactly symmetric by
// construction. with_noise adds the Kronecker-delta noise on the diagonal.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const SEHyperparams& hp, bool with_noise);

// Cross-kernel vector k_a(X, x) for one hyperparameter set.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                              const SEHyperparams& hp);

// Multi-output SE-GP conditioned on a training set. Immutable once built;
// safe for concurrent read-only use.
class GPModel {
 public:
  // Conditions on the data with the given per-dimension hyperparameters:
  // factorizes each K_a + sigma_a^2 I and caches beta_a and the inverse.
  static GPModel fit(Eigen::MatrixXd inputs, Eigen::MatrixXd targets,
                     std::vector<SEHyperparams> hyperparams);

  Eigen::Index input_dim() const { return inputs_.cols(); }
  Eigen::Index output_dim() const { return targets_.cols(); }
  Eigen::Index size() const { return inputs_.rows(); }

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& targets() const { return targets_; }
  const SEHyperparams& hyperparams(Eigen::Index a) const { return hp_[static_cast<size_t>(a)]; }
  const Eigen::MatrixXd& beta() const { return beta_; }
  const PsdFactor& gram_factor(Eigen::Index a) const { return factors_[static_cast<size_t>(a)]; }
  const Eigen::MatrixXd& gram_inverse(Eigen::Index a) const {
    return gram_inv_[static_cast<size_t>(a)];
  }

  // Learned noise variances, one per target dimension.
  Eigen::VectorXd noise_variances() const;

 private:
  Eigen::MatrixXd inputs_;   // n x D
  Eigen::MatrixXd targets_;  // n x E
  std::vector<SEHyperparams> hp_;
  Eigen::MatrixXd beta_;  // n x E, column a solves (K_a + sigma_a^2 I) beta_a = y_a
  std::vector<PsdFactor> factors_;
  std::vector<Eigen::MatrixXd> gram_inv_;
};

struct PointPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

// Posterior at a deterministic input; target dimensions are independent here.
// with_noise adds the per-dimension noise variance (predicting an observation
// rather than a function value). Variances are clamped at zero from below.
PointPrediction predict_point(const GPModel& model, const Eigen::VectorXd& x,
                              bool with_noise = false);

}  // namespace gpsmooth::gp
