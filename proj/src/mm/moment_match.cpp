#include "gpsmooth/mm/moment_match.hpp"

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/simd/kernels.hpp"

namespace gpsmooth::mm {

Scratch compute_q(const gp::GPModel& model, const GaussianBelief& belief) {
  const Eigen::Index n = model.size();
  const Eigen::Index D = model.input_dim();
  const Eigen::Index E = model.output_dim();
  if (belief.dim() != D) {
    throw ContractError("compute_q: belief dimension does not match model input dimension");
  }

  Scratch s;
  s.mu = belief.mean;
  s.sigma = symmetrized(belief.cov);
  s.zeta = model.inputs().rowwise() - s.mu.transpose();
  s.q.resize(n, E);
  s.log_q.resize(n, E);
  s.quad.resize(n, E);
  s.lam_inv_zeta.resize(static_cast<size_t>(E));
  s.s_factor.reserve(static_cast<size_t>(E));
  s.log_alpha2.resize(E);

  for (Eigen::Index a = 0; a < E; ++a) {
    const auto& hp = model.hyperparams(a);
    s.log_alpha2[a] = std::log(hp.signal_variance);
    const Eigen::VectorXd lam = hp.length_scales.array().square().matrix();

    Eigen::MatrixXd S = s.sigma;
    S.diagonal() += lam;
    PsdFactor f = factor_psd(S, "moment match S matrix, dimension " + std::to_string(a));

    // q_{a,i} = alpha^2 sqrt(|Lambda|/|S|) exp(-1/2 zeta_i' S^-1 zeta_i),
    // assembled in the log domain.
    const double half_logdet_ratio = 0.5 * (lam.array().log().sum() - f.log_det());
    const Eigen::MatrixXd solved =
        f.llt.matrixL().solve(Eigen::MatrixXd(s.zeta.transpose()));  // D x n
    s.log_q.col(a) =
        (-0.5 * solved.colwise().squaredNorm().transpose().array() + s.log_alpha2[a] +
         half_logdet_ratio)
            .matrix();
    simd::exp_shift_scale(s.log_q.col(a).data(), 0.0, 1.0, s.q.col(a).data(),
                          static_cast<std::size_t>(n));

    Eigen::MatrixXd& u = s.lam_inv_zeta[static_cast<size_t>(a)];
    u = s.zeta * lam.cwiseInverse().asDiagonal();
    s.quad.col(a) = (s.zeta.cwiseProduct(u)).rowwise().sum();
    s.s_factor.push_back(std::move(f));
  }
  return s;
}

Eigen::VectorXd predict_mean(const gp::GPModel& model, const Scratch& scratch) {
  const Eigen::Index E = model.output_dim();
  Eigen::VectorXd mean(E);
  for (Eigen::Index a = 0; a < E; ++a) {
    mean[a] = simd::dot(model.beta().col(a).data(), scratch.q.col(a).data(),
                        static_cast<std::size_t>(model.size()));
  }
  return mean;
}

Eigen::VectorXd predict_mean(const gp::GPModel& model, const GaussianBelief& belief) {
  return predict_mean(model, compute_q(model, belief));
}

namespace {

// Residual matrix Delta_ab = Q_ab - q_a q_b^T, with Q per the log-domain
// exponent form: Q_ij = exp(n_ij^2)/sqrt(|R|). R = Sigma (Lambda_a^-1 +
// Lambda_b^-1) + I is handled via the symmetric congruence R' = E^{1/2} Sigma
// E^{1/2} + I (same determinant), and R^-1 Sigma = E^{-1/2}(I - R'^-1)E^{-1/2}.
// The ratio Q_ij/(q_ai q_bj) is assembled in the log domain and expanded with
// expm1, so the covariance-of-means contributions keep full precision even
// when models are nearly deterministic and Q almost equals q q^T.
Eigen::MatrixXd delta_matrix(const gp::GPModel& model, const Scratch& s, Eigen::Index a,
                             Eigen::Index b) {
  const Eigen::Index n = model.size();
  const Eigen::Index D = model.input_dim();
  const Eigen::VectorXd e = model.hyperparams(a).length_scales.array().square().inverse() +
                            model.hyperparams(b).length_scales.array().square().inverse();
  const Eigen::VectorXd e_half = e.cwiseSqrt();

  Eigen::MatrixXd r_prime =
      e_half.asDiagonal() * s.sigma * e_half.asDiagonal() + Eigen::MatrixXd::Identity(D, D);
  PsdFactor rf = factor_psd(r_prime, "moment match R matrix, dimensions " + std::to_string(a) +
                                         "," + std::to_string(b));
  const Eigen::MatrixXd r_inv =
      rf.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(D, D)));
  const Eigen::MatrixXd t = e_half.cwiseInverse().asDiagonal() *
                            (Eigen::MatrixXd::Identity(D, D) - r_inv) *
                            e_half.cwiseInverse().asDiagonal();

  const Eigen::MatrixXd& ua = s.lam_inv_zeta[static_cast<size_t>(a)];
  const Eigen::MatrixXd& ub = s.lam_inv_zeta[static_cast<size_t>(b)];
  const Eigen::MatrixXd ua_t = ua * t;  // n x D

  Eigen::MatrixXd delta = ua_t * ub.transpose();  // cross exponent term
  const Eigen::VectorXd row_add =
      (0.5 * (ua_t.cwiseProduct(ua).rowwise().sum() - s.quad.col(a)).array() + s.log_alpha2[a] -
       s.log_q.col(a).array())
          .matrix();
  Eigen::VectorXd col_add;
  if (a == b) {
    col_add = row_add;
  } else {
    const Eigen::MatrixXd ub_t = ub * t;
    col_add = (0.5 * (ub_t.cwiseProduct(ub).rowwise().sum() - s.quad.col(b)).array() +
               s.log_alpha2[b] - s.log_q.col(b).array())
                  .matrix();
  }
  const double c = -0.5 * rf.log_det();
  simd::expm1_outer_scale(delta.data(), static_cast<std::size_t>(n), static_cast<std::size_t>(n),
                          static_cast<std::size_t>(n), row_add.data(), col_add.data(), c,
                          s.q.col(a).data(), s.q.col(b).data());
  return delta;
}

}  // namespace

Eigen::MatrixXd predict_cov(const gp::GPModel& model, const Scratch& scratch,
                            const std::optional<Eigen::VectorXd>& noise) {
  const Eigen::Index E = model.output_dim();
  if (noise && noise->size() != E) {
    throw ContractError("predict_cov: noise vector must have one entry per output dimension");
  }
  Eigen::MatrixXd cov(E, E);
  for (Eigen::Index a = 0; a < E; ++a) {
    for (Eigen::Index b = a; b < E; ++b) {
      // beta_a' Q_ab beta_b - mean_a mean_b == beta_a' Delta_ab beta_b
      const Eigen::MatrixXd delta = delta_matrix(model, scratch, a, b);
      double entry = model.beta().col(a).dot(delta * model.beta().col(b));
      if (a == b) {
        // Expected model variance alpha^2 - tr((K+sigma^2 I)^-1 Q_aa), with
        // tr(M q q') peeled off as the PSD-safe quadratic form q' M q.
        const Eigen::VectorXd q = scratch.q.col(a);
        entry += model.hyperparams(a).signal_variance - q.dot(model.gram_factor(a).solve(q)) -
                 model.gram_inverse(a).cwiseProduct(delta).sum();
        if (noise) entry += (*noise)[a];
      }
      cov(a, b) = entry;
      cov(b, a) = entry;
    }
  }
  return cov;
}

Eigen::MatrixXd predict_cov(const gp::GPModel& model, const GaussianBelief& belief,
                            const std::optional<Eigen::VectorXd>& noise) {
  return predict_cov(model, compute_q(model, belief), noise);
}

Eigen::MatrixXd cross_cov(const gp::GPModel& model, const Scratch& scratch) {
  const Eigen::Index D = model.input_dim();
  const Eigen::Index E = model.output_dim();
  Eigen::MatrixXd cross(D, E);
  for (Eigen::Index a = 0; a < E; ++a) {
    // Sigma (Sigma + Lambda_a)^-1 sum_i beta_{a,i} q_{a,i} zeta_i
    const Eigen::VectorXd weights = model.beta().col(a).cwiseProduct(scratch.q.col(a));
    const Eigen::VectorXd weighted_sum = scratch.zeta.transpose() * weights;
    cross.col(a) =
        scratch.sigma * scratch.s_factor[static_cast<size_t>(a)].solve(weighted_sum);
  }
  return cross;
}

Eigen::MatrixXd cross_cov(const gp::GPModel& model, const GaussianBelief& belief) {
  return cross_cov(model, compute_q(model, belief));
}

PropagatedMoments propagate(const gp::GPModel& model, const GaussianBelief& belief,
                            const std::optional<Eigen::VectorXd>& noise) {
  const Scratch scratch = compute_q(model, belief);
  PropagatedMoments out;
  out.mean = predict_mean(model, scratch);
  out.cov = predict_cov(model, scratch, noise);
  out.cross_cov = cross_cov(model, scratch);
  return out;
}

}  // namespace gpsmooth::mm
