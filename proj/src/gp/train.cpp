#include "gpsmooth/gp/train.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "gpsmooth/core/rng.hpp"
#include "gpsmooth/simd/kernels.hpp"

namespace gpsmooth::gp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SEHyperparams hp_from_log(const Eigen::VectorXd& t, Eigen::Index D) {
  SEHyperparams hp;
  hp.length_scales = t.head(D).array().exp().matrix();
  const double alpha = std::exp(t[D]);
  const double sigma = std::exp(t[D + 1]);
  hp.signal_variance = alpha * alpha;
  hp.noise_variance = sigma * sigma;
  return hp;
}

// Negative evidence for one target dimension with the per-input-dimension
// squared-difference matrices cached across evaluations (they only depend on
// the inputs). Returns +inf on factorization failure so the line search backs
// off instead of aborting.
class EvidenceProblem {
 public:
  EvidenceProblem(const Eigen::MatrixXd& X, Eigen::VectorXd y)
      : X_(X), y_(std::move(y)), n_(X.rows()), D_(X.cols()) {
    d2_.reserve(static_cast<size_t>(D_));
    for (Eigen::Index d = 0; d < D_; ++d) {
      Eigen::MatrixXd m(n_, n_);
      for (Eigen::Index j = 0; j < n_; ++j) {
        m(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < n_; ++i) {
          const double delta = X(i, d) - X(j, d);
          m(i, j) = delta * delta;
          m(j, i) = m(i, j);
        }
      }
      d2_.push_back(std::move(m));
    }
  }

  double operator()(const Eigen::VectorXd& t, Eigen::VectorXd* grad) const {
    const SEHyperparams hp = hp_from_log(t, D_);
    // A = alpha^2 exp(-1/2 sum_d D2_d / l_d^2)
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
    for (Eigen::Index d = 0; d < D_; ++d) {
      A.noalias() += (-0.5 / (hp.length_scales[d] * hp.length_scales[d])) * d2_[static_cast<size_t>(d)];
    }
    simd::exp_shift_scale(A.data(), 0.0, hp.signal_variance, A.data(),
                          static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    Eigen::MatrixXd K = A;
    K.diagonal().array() += hp.noise_variance;
    auto f = try_factor_psd(K);
    if (!f) return kInf;
    const Eigen::VectorXd beta = f->solve(y_);
    const double value = -0.5 * y_.dot(beta) - 0.5 * f->log_det() -
                         0.5 * static_cast<double>(n_) * std::log(2.0 * M_PI);
    if (!std::isfinite(value)) return kInf;
    if (grad) {
      const Eigen::MatrixXd kinv =
          f->solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n_, n_)));
      const Eigen::MatrixXd W = beta * beta.transpose() - kinv;  // dL/dK = W/2
      const Eigen::MatrixXd WA = W.cwiseProduct(A);
      grad->resize(D_ + 2);
      for (Eigen::Index d = 0; d < D_; ++d) {
        const double inv_l2 = 1.0 / (hp.length_scales[d] * hp.length_scales[d]);
        (*grad)[d] = 0.5 * inv_l2 * WA.cwiseProduct(d2_[static_cast<size_t>(d)]).sum();
      }
      (*grad)[D_] = WA.sum();                          // d/dlog(alpha): dK = 2A
      (*grad)[D_ + 1] = hp.noise_variance * W.trace();  // d/dlog(sigma): dK = 2 sigma^2 I
      *grad = -(*grad);                                 // minimizing
    }
    return -value;
  }

  Eigen::Index input_dim() const { return D_; }

 private:
  const Eigen::MatrixXd& X_;
  Eigen::VectorXd y_;
  Eigen::Index n_, D_;
  std::vector<Eigen::MatrixXd> d2_;
};

// Scale-relative box for the log-parameters. Unbounded evidence maximization
// drifts into the huge-lengthscale / huge-signal regime on near-linear data
// (SE kernel linear limit: l -> inf with alpha^2/l^2 fixed), where the
// downstream moment formulas lose all precision to cancellation.
struct ParamBounds {
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd clamp(const Eigen::VectorXd& t) const { return t.cwiseMax(lo).cwiseMin(hi); }
};

struct LbfgsResult {
  Eigen::VectorXd t;
  double f = kInf;
  bool any_finite = false;
};

LbfgsResult lbfgs_minimize(const EvidenceProblem& problem, const ParamBounds& bounds,
                           Eigen::VectorXd t0, const TrainOptions& opts) {
  constexpr int kHistory = 10;
  LbfgsResult res;
  Eigen::VectorXd t = bounds.clamp(t0);
  Eigen::VectorXd g;
  double f = problem(t, &g);
  if (!std::isfinite(f)) return res;
  res = {t, f, true};

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (g.cwiseAbs().maxCoeff() < opts.grad_tol * std::max(1.0, std::abs(f))) break;

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[static_cast<size_t>(i)] =
          rho_hist[static_cast<size_t>(i)] * s_hist[static_cast<size_t>(i)].dot(q);
      q -= alpha[static_cast<size_t>(i)] * y_hist[static_cast<size_t>(i)];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      const double yy = y_hist.back().squaredNorm();
      if (yy > 0.0) gamma = s_hist.back().dot(y_hist.back()) / yy;
    }
    Eigen::VectorXd dir = -gamma * q;
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(dir);
      dir += (alpha[i] - b) * s_hist[i];
    }
    if (dir.dot(g) >= 0.0) dir = -g;  // fall back to steepest descent

    // Backtracking Armijo line search on the clamped iterate.
    const double slope = dir.dot(g);
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd t_new, g_new;
    double f_new = kInf;
    for (int ls = 0; ls < 40; ++ls) {
      t_new = bounds.clamp(t + step * dir);
      f_new = problem(t_new, nullptr);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    problem(t_new, &g_new);

    const Eigen::VectorXd s = t_new - t;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double improvement = f - f_new;
    t = t_new;
    f = f_new;
    g = g_new;
    if (f < res.f) res = {t, f, true};
    if (improvement < 1e-10 * std::max(1.0, std::abs(f))) break;
  }
  return res;
}

double column_std(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / std::max<double>(1.0, v.size() - 1.0);
  const double sd = std::sqrt(var);
  return sd > 1e-12 ? sd : 1.0;
}

}  // namespace

Evidence log_evidence(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const SEHyperparams& hp) {
  hp.validate();
  Eigen::VectorXd t(X.cols() + 2);
  t.head(X.cols()) = hp.length_scales.array().log().matrix();
  t[X.cols()] = 0.5 * std::log(hp.signal_variance);
  t[X.cols() + 1] = 0.5 * std::log(hp.noise_variance);
  const EvidenceProblem problem(X, y);
  Evidence ev;
  Eigen::VectorXd grad;
  const double neg = problem(t, &grad);
  if (!std::isfinite(neg)) {
    throw ConditioningError("log_evidence: gram matrix of dimension " + std::to_string(X.rows()) +
                            " not positive definite");
  }
  ev.value = -neg;
  ev.grad = -grad;
  return ev;
}

TrainedDim train_single_dim(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const TrainOptions& opts, std::uint64_t seed) {
  const Eigen::Index D = X.cols();
  Eigen::VectorXd input_scale(D);
  for (Eigen::Index d = 0; d < D; ++d) input_scale[d] = column_std(X.col(d));
  const double target_scale = column_std(y);
  const EvidenceProblem problem(X, y);

  ParamBounds bounds;
  bounds.lo.resize(D + 2);
  bounds.hi.resize(D + 2);
  for (Eigen::Index d = 0; d < D; ++d) {
    bounds.lo[d] = std::log(input_scale[d]) - 6.0;
    bounds.hi[d] = std::log(input_scale[d]) + 4.0;  // ~55x the input spread
  }
  bounds.lo[D] = std::log(target_scale) - 6.0;
  bounds.hi[D] = std::log(target_scale) + 4.0;
  bounds.lo[D + 1] = std::log(target_scale) - 9.0;
  bounds.hi[D + 1] = std::log(target_scale) + 2.0;

  LbfgsResult best;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd t0(D + 2);
    if (r == 0) {
      for (Eigen::Index d = 0; d < D; ++d) t0[d] = std::log(input_scale[d]);
      t0[D] = std::log(target_scale);
      t0[D + 1] = std::log(0.1 * target_scale);
    } else {
      const double lo = std::log(1e-2), hi = std::log(1e1);
      for (Eigen::Index d = 0; d < D; ++d) {
        t0[d] = std::log(input_scale[d]) + rng.uniform(lo, hi);
      }
      t0[D] = std::log(target_scale) + rng.uniform(lo, hi);
      t0[D + 1] = std::log(target_scale) + rng.uniform(lo, 0.0);
    }
    LbfgsResult res = lbfgs_minimize(problem, bounds, t0, opts);
    if (res.any_finite && res.f < best.f) best = res;
  }
  if (!best.any_finite) {
    throw TrainingError("train_gp: every restart failed (no finite evidence reached)", -kInf);
  }
  return {hp_from_log(best.t, D), -best.f};
}

GPModel train_gp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const TrainOptions& opts,
                 std::uint64_t seed) {
  if (X.rows() < 2) throw ContractError("train_gp: need at least two points");
  if (X.rows() != Y.rows()) throw ContractError("train_gp: inputs/targets row mismatch");
  std::vector<SEHyperparams> hps;
  hps.reserve(static_cast<size_t>(Y.cols()));
  for (Eigen::Index a = 0; a < Y.cols(); ++a) {
    const auto trained =
        train_single_dim(X, Y.col(a), opts, derive_seed(seed, 0x5000 + static_cast<std::uint64_t>(a)));
    hps.push_back(trained.hp);
  }
  return GPModel::fit(X, Y, std::move(hps));
}

}  // namespace gpsmooth::gp
