#include "gpsmooth/core/psd.hpp"

#include "gpsmooth/core/errors.hpp"

namespace gpsmooth {

namespace {
std::optional<PsdFactor> attempt(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) return std::nullopt;
  PsdFactor f;
  f.llt.compute(m);
  if (f.llt.info() == Eigen::Success) return f;
  const Eigen::Index n = m.rows();
  const double scale = m.trace() / static_cast<double>(n);
  if (!(scale > 0.0)) return std::nullopt;  // no meaningful jitter scale
  for (double jitter = 1e-10 * scale; jitter <= 1e-4 * scale * (1.0 + 1e-12); jitter *= 10.0) {
    Eigen::MatrixXd jm = m;
    jm.diagonal().array() += jitter;
    f.llt.compute(jm);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      return f;
    }
  }
  return std::nullopt;
}
}  // namespace

PsdFactor factor_psd(const Eigen::MatrixXd& m, const std::string& context) {
  auto f = attempt(m);
  if (!f) {
    throw ConditioningError("matrix of dimension " + std::to_string(m.rows()) +
                            " not positive definite after jitter ladder: " + context);
  }
  return std::move(*f);
}

std::optional<PsdFactor> try_factor_psd(const Eigen::MatrixXd& m) { return attempt(m); }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& m, double* repair) {
  Eigen::MatrixXd sym = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd evals = es.eigenvalues();
  const double worst = evals.minCoeff();
  if (repair) *repair = worst < 0.0 ? -worst : 0.0;
  if (worst >= 0.0) return sym;
  Eigen::VectorXd floored = evals.cwiseMax(0.0);
  return es.eigenvectors() * floored.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace gpsmooth
