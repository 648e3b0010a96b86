#pragma once

#include <Eigen/Dense>

#include "gpsmooth/core/rng.hpp"
#include "gpsmooth/gp/model.hpp"

namespace gpsmooth::test {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

inline Eigen::MatrixXd random_psd(Rng& rng, Eigen::Index d, double scale = 1.0) {
  const Eigen::MatrixXd w = random_matrix(rng, d, d);
  return scale * scale / static_cast<double>(d) * (w * w.transpose()) +
         1e-8 * Eigen::MatrixXd::Identity(d, d);
}

// Small random GP conditioned on targets drawn from its own prior.
inline gp::GPModel random_gp(Rng& rng, Eigen::Index n, Eigen::Index D, Eigen::Index E,
                             double spread = 1.5) {
  const Eigen::MatrixXd X = random_matrix(rng, n, D, spread);
  std::vector<gp::SEHyperparams> hps;
  Eigen::MatrixXd Y(n, E);
  for (Eigen::Index a = 0; a < E; ++a) {
    gp::SEHyperparams hp;
    hp.length_scales.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) hp.length_scales[d] = spread * rng.uniform(0.6, 1.8);
    hp.signal_variance = rng.uniform(0.5, 3.0);
    hp.noise_variance = rng.uniform(1e-3, 0.05);
    Eigen::MatrixXd K = gp::gram_matrix(X, hp, false);
    K.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    Y.col(a) = llt.matrixL() * rng.normal_vector(n) +
               std::sqrt(hp.noise_variance) * rng.normal_vector(n);
    hps.push_back(std::move(hp));
  }
  return gp::GPModel::fit(X, Y, std::move(hps));
}

}  // namespace gpsmooth::test
