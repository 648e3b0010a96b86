#include "gpsmooth/gp/model.hpp"

#include "gpsmooth/simd/kernels.hpp"

namespace gpsmooth::gp {

double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const SEHyperparams& hp) {
  if (x.size() != hp.length_scales.size() || x_prime.size() != hp.length_scales.size()) {
    throw ContractError("se_kernel: input dimension does not match length_scales");
  }
  double quad = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double delta = (x[d] - x_prime[d]) / hp.length_scales[d];
    quad += delta * delta;
  }
  return hp.signal_variance * std::exp(-0.5 * quad);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const SEHyperparams& hp, bool with_noise) {
  const Eigen::Index n = X.rows();
  const Eigen::Index D = X.cols();
  if (D != hp.length_scales.size()) {
    throw ContractError("gram_matrix: input dimension does not match length_scales");
  }
  // Scaled inputs, then -1/2 squared distances mirrored for exact symmetry.
  Eigen::MatrixXd Z = X;
  for (Eigen::Index d = 0; d < D; ++d) Z.col(d) /= hp.length_scales[d];
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double d2 = (Z.row(i) - Z.row(j)).squaredNorm();
      K(i, j) = -0.5 * d2;
      K(j, i) = K(i, j);
    }
  }
  simd::exp_shift_scale(K.data(), 0.0, hp.signal_variance, K.data(),
                        static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  if (with_noise) K.diagonal().array() += hp.noise_variance;
  return K;
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                              const SEHyperparams& hp) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double quad = 0.0;
    for (Eigen::Index d = 0; d < X.cols(); ++d) {
      const double delta = (X(i, d) - x[d]) / hp.length_scales[d];
      quad += delta * delta;
    }
    k[i] = -0.5 * quad;
  }
  simd::exp_shift_scale(k.data(), 0.0, hp.signal_variance, k.data(),
                        static_cast<std::size_t>(n));
  return k;
}

GPModel GPModel::fit(Eigen::MatrixXd inputs, Eigen::MatrixXd targets,
                     std::vector<SEHyperparams> hyperparams) {
  if (inputs.rows() != targets.rows()) throw ContractError("fit: inputs/targets row mismatch");
  if (static_cast<Eigen::Index>(hyperparams.size()) != targets.cols()) {
    throw ContractError("fit: one hyperparameter set per target dimension required");
  }
  GPModel m;
  m.inputs_ = std::move(inputs);
  m.targets_ = std::move(targets);
  m.hp_ = std::move(hyperparams);
  const Eigen::Index n = m.inputs_.rows();
  const Eigen::Index E = m.targets_.cols();
  m.beta_.resize(n, E);
  m.factors_.reserve(static_cast<size_t>(E));
  m.gram_inv_.reserve(static_cast<size_t>(E));
  for (Eigen::Index a = 0; a < E; ++a) {
    m.hp_[static_cast<size_t>(a)].validate();
    if (m.hp_[static_cast<size_t>(a)].input_dim() != m.inputs_.cols()) {
      throw ContractError("fit: length_scales dimension mismatch");
    }
    Eigen::MatrixXd K = gram_matrix(m.inputs_, m.hp_[static_cast<size_t>(a)], true);
    PsdFactor f = factor_psd(K, "gram matrix, target dimension " + std::to_string(a));
    m.beta_.col(a) = f.solve(Eigen::VectorXd(m.targets_.col(a)));
    m.gram_inv_.push_back(f.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n))));
    m.factors_.push_back(std::move(f));
  }
  return m;
}

Eigen::VectorXd GPModel::noise_variances() const {
  Eigen::VectorXd v(output_dim());
  for (Eigen::Index a = 0; a < output_dim(); ++a) v[a] = hp_[static_cast<size_t>(a)].noise_variance;
  return v;
}

PointPrediction predict_point(const GPModel& model, const Eigen::VectorXd& x, bool with_noise) {
  if (x.size() != model.input_dim()) throw ContractError("predict_point: dimension mismatch");
  const Eigen::Index E = model.output_dim();
  PointPrediction out;
  out.mean.resize(E);
  out.var.resize(E);
  for (Eigen::Index a = 0; a < E; ++a) {
    const auto& hp = model.hyperparams(a);
    const Eigen::VectorXd k = kernel_vector(model.inputs(), x, hp);
    out.mean[a] = simd::dot(k.data(), model.beta().col(a).data(), static_cast<std::size_t>(k.size()));
    const Eigen::VectorXd solved = model.gram_factor(a).solve(k);
    double var = hp.signal_variance - k.dot(solved);
    if (var < 0.0) var = 0.0;
    if (with_noise) var += hp.noise_variance;
    out.var[a] = var;
  }
  return out;
}

}  // namespace gpsmooth::gp
