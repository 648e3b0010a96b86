#include <algorithm>
#include <cmath>
#include <vector>

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/systems/kitagawa.hpp"
#include "gpsmooth/systems/linear.hpp"
#include "gpsmooth/systems/pendulum.hpp"

namespace gpsmooth::systems {

Eigen::VectorXd sample_gaussian(Rng& rng, const GaussianBelief& belief) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(belief.cov);
  const Eigen::MatrixXd sqrt_cov =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return belief.mean + sqrt_cov * rng.normal_vector(belief.dim());
}

Trajectory simulate(const AnalyticSystem& system, const GaussianBelief& prior, int steps,
                    std::uint64_t seed) {
  if (prior.dim() != system.state_dim) throw ContractError("simulate: prior dimension mismatch");
  Rng rng(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.states.resize(steps + 1, system.state_dim);
  traj.measurements.resize(steps, system.meas_dim);
  traj.controls.resize(steps, system.control_dim);

  const Eigen::VectorXd w_std = system.process_noise.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Eigen::VectorXd v_std = system.meas_noise.diagonal().cwiseMax(0.0).cwiseSqrt();

  traj.states.row(0) = sample_gaussian(rng, prior).transpose();
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd u(system.control_dim);
    if (system.control_dim > 0) u = system.sample_control(rng);
    traj.controls.row(t) = u.transpose();
    Eigen::VectorXd x = system.f(traj.states.row(t).transpose(), u);
    for (Eigen::Index d = 0; d < system.state_dim; ++d) x[d] += w_std[d] * rng.normal();
    traj.states.row(t + 1) = x.transpose();
    Eigen::VectorXd z = system.g(x);
    for (Eigen::Index e = 0; e < system.meas_dim; ++e) z[e] += v_std[e] * rng.normal();
    traj.measurements.row(t) = z.transpose();
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Kitagawa growth model

double kitagawa_f(double x) { return 0.5 * x + 25.0 * x / (1.0 + x * x); }
double kitagawa_g(double x) { return 5.0 * std::sin(x); }

AnalyticSystem kitagawa_system(const KitagawaParams& p) {
  AnalyticSystem s;
  s.name = "kitagawa";
  s.state_dim = 1;
  s.meas_dim = 1;
  s.control_dim = 0;
  s.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(1, kitagawa_f(x[0]));
  };
  s.f_jac = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    const double x2 = x[0] * x[0];
    const double d = 0.5 + 25.0 * (1.0 - x2) / ((1.0 + x2) * (1.0 + x2));
    return Eigen::MatrixXd::Constant(1, 1, d);
  };
  s.g = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, kitagawa_g(x[0])); };
  s.g_jac = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, 5.0 * std::cos(x[0]));
  };
  s.process_noise = Eigen::MatrixXd::Constant(1, 1, p.sigma_w * p.sigma_w);
  s.meas_noise = Eigen::MatrixXd::Constant(1, 1, p.sigma_v * p.sigma_v);
  return s;
}

TrainingSet make_kitagawa_training(int n, const KitagawaParams& p, double region_lo,
                                   double region_hi, std::uint64_t seed) {
  if (n < 2) throw ContractError("make_kitagawa_training: need n >= 2");
  Rng rng(seed);
  TrainingSet ts;
  ts.f_inputs.resize(n, 1);
  ts.f_targets.resize(n, 1);
  ts.g_targets.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(region_lo, region_hi);
    ts.f_inputs(i, 0) = x;
    ts.f_targets(i, 0) = kitagawa_f(x) + p.sigma_w * rng.normal();
    ts.g_targets(i, 0) = kitagawa_g(x) + p.sigma_v * rng.normal();
  }
  ts.g_inputs = ts.f_inputs;
  return ts;
}

// ---------------------------------------------------------------------------
// Pendulum

namespace {
Eigen::Vector2d pendulum_deriv(const Eigen::Vector2d& x, double torque, const PendulumParams& p) {
  const double accel = (torque - 0.5 * p.mass * p.length * p.gravity * std::sin(x[1])) /
                       (0.25 * p.mass * p.length * p.length + p.inertia());
  return {accel, x[0]};
}
}  // namespace

Eigen::VectorXd pendulum_f(const Eigen::VectorXd& x, double torque, const PendulumParams& p,
                           int substeps_override) {
  if (x.size() != 2) throw ContractError("pendulum_f: state must be [angvel, angle]");
  const double u = std::clamp(torque, p.torque_min, p.torque_max);
  const int steps = substeps_override > 0 ? substeps_override : p.substeps;
  const double h = p.dt / steps;
  Eigen::Vector2d s = x;
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector2d k1 = pendulum_deriv(s, u, p);
    const Eigen::Vector2d k2 = pendulum_deriv(s + 0.5 * h * k1, u, p);
    const Eigen::Vector2d k3 = pendulum_deriv(s + 0.5 * h * k2, u, p);
    const Eigen::Vector2d k4 = pendulum_deriv(s + h * k3, u, p);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

double pendulum_g(const Eigen::VectorXd& x, const PendulumParams& p) {
  if (x.size() != 2) throw ContractError("pendulum_g: state must be [angvel, angle]");
  const double phi = x[1];
  return std::atan2(-1.0 - p.length * std::sin(phi), 0.5 - p.length * std::cos(phi));
}

double pendulum_energy(const Eigen::VectorXd& x, const PendulumParams& p) {
  const double pivot_inertia = 0.25 * p.mass * p.length * p.length + p.inertia();
  return 0.5 * pivot_inertia * x[0] * x[0] +
         0.5 * p.mass * p.gravity * p.length * (1.0 - std::cos(x[1]));
}

AnalyticSystem pendulum_system(const PendulumParams& p) {
  AnalyticSystem s;
  s.name = "pendulum";
  s.state_dim = 2;
  s.meas_dim = 1;
  s.control_dim = 1;
  s.f = [p](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return pendulum_f(x, u.size() > 0 ? u[0] : 0.0, p);
  };
  // Central differences on the integrated map.
  s.f_jac = [p](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const double torque = u.size() > 0 ? u[0] : 0.0;
    const double h = 1e-6;
    Eigen::MatrixXd jac(2, 2);
    for (int d = 0; d < 2; ++d) {
      Eigen::VectorXd hi = x, lo = x;
      hi[d] += h;
      lo[d] -= h;
      jac.col(d) = (pendulum_f(hi, torque, p) - pendulum_f(lo, torque, p)) / (2.0 * h);
    }
    return jac;
  };
  s.g = [p](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, pendulum_g(x, p)); };
  s.g_jac = [p](const Eigen::VectorXd& x) {
    const double phi = x[1];
    const double num = -1.0 - p.length * std::sin(phi);
    const double den = 0.5 - p.length * std::cos(phi);
    const double dnum = -p.length * std::cos(phi);
    const double dden = p.length * std::sin(phi);
    const double r2 = num * num + den * den;
    Eigen::MatrixXd jac(1, 2);
    jac(0, 0) = 0.0;
    jac(0, 1) = (dnum * den - num * dden) / r2;  // d atan2(num, den)/d phi
    return jac;
  };
  s.process_noise = Eigen::Vector2d(p.sigma_w_angvel * p.sigma_w_angvel,
                                    p.sigma_w_angle * p.sigma_w_angle)
                        .asDiagonal();
  s.meas_noise = Eigen::MatrixXd::Constant(1, 1, p.sigma_v * p.sigma_v);
  s.sample_control = [p](Rng& rng) {
    return Eigen::VectorXd::Constant(1, rng.uniform(p.torque_min, p.torque_max));
  };
  return s;
}

GaussianBelief pendulum_prior() {
  const double angle_std = M_PI / 16.0;
  return GaussianBelief(Eigen::Vector2d::Zero(),
                        Eigen::Vector2d(0.01 * 0.01, angle_std * angle_std).asDiagonal());
}

TrainingSet make_pendulum_training(int n, const PendulumParams& p, std::uint64_t seed,
                                   double margin, int probe_steps) {
  if (n < 2) throw ContractError("make_pendulum_training: need n >= 2");
  const AnalyticSystem sys = pendulum_system(p);

  // Training states follow where trajectories actually go: states pooled
  // from several probe trajectories, resampled with replacement and jittered
  // by up to `margin` per dimension. A uniform box over the same envelope
  // wastes most of the budget once a probe spins through several turns.
  const int probes = 25;
  std::vector<Eigen::Vector2d> pooled;
  for (int k = 0; k < probes; ++k) {
    const Trajectory probe =
        simulate(sys, pendulum_prior(), probe_steps, derive_seed(seed, 1 + static_cast<std::uint64_t>(k)));
    for (Eigen::Index t = 0; t < probe.states.rows(); ++t) {
      pooled.emplace_back(probe.states(t, 0), probe.states(t, 1));
    }
  }

  Rng rng(derive_seed(seed, 2));
  TrainingSet ts;
  ts.f_inputs.resize(n, 3);
  ts.f_targets.resize(n, 2);
  ts.g_inputs.resize(n, 2);
  ts.g_targets.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    // stride through the pool so anchors cover it evenly
    const std::size_t idx =
        (static_cast<std::size_t>(i) * pooled.size()) / static_cast<std::size_t>(n);
    const Eigen::Vector2d& anchor = pooled[idx % pooled.size()];
    Eigen::Vector2d x(anchor[0] + rng.uniform(-margin, margin),
                      anchor[1] + rng.uniform(-margin, margin));
    const double u = rng.uniform(p.torque_min, p.torque_max);
    const Eigen::VectorXd next = pendulum_f(x, u, p);
    ts.f_inputs.row(i) << x[0], x[1], u;
    ts.f_targets(i, 0) = next[0] + p.sigma_w_angvel * rng.normal();
    ts.f_targets(i, 1) = next[1] + p.sigma_w_angle * rng.normal();
    ts.g_inputs.row(i) = x.transpose();
    ts.g_targets(i, 0) = pendulum_g(x, p) + p.sigma_v * rng.normal();
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Linear-Gaussian oracle system

AnalyticSystem linear_system(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                             const Eigen::MatrixXd& process_noise,
                             const Eigen::MatrixXd& meas_noise) {
  AnalyticSystem s;
  s.name = "linear";
  s.state_dim = A.rows();
  s.meas_dim = C.rows();
  s.control_dim = 0;
  s.f = [A](const Eigen::VectorXd& x, const Eigen::VectorXd&) -> Eigen::VectorXd { return A * x; };
  s.f_jac = [A](const Eigen::VectorXd&, const Eigen::VectorXd&) { return A; };
  s.g = [C](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x; };
  s.g_jac = [C](const Eigen::VectorXd&) { return C; };
  s.process_noise = process_noise;
  s.meas_noise = meas_noise;
  return s;
}

TrainingSet make_linear_training(int n, const AnalyticSystem& sys, double region_lo,
                                 double region_hi, std::uint64_t seed) {
  if (n < 2) throw ContractError("make_linear_training: need n >= 2");
  Rng rng(seed);
  const Eigen::VectorXd w_std = sys.process_noise.diagonal().cwiseSqrt();
  const Eigen::VectorXd v_std = sys.meas_noise.diagonal().cwiseSqrt();
  TrainingSet ts;
  ts.f_inputs.resize(n, sys.state_dim);
  ts.f_targets.resize(n, sys.state_dim);
  ts.g_inputs.resize(n, sys.state_dim);
  ts.g_targets.resize(n, sys.meas_dim);
  const Eigen::VectorXd no_control(0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(sys.state_dim);
    for (Eigen::Index d = 0; d < sys.state_dim; ++d) x[d] = rng.uniform(region_lo, region_hi);
    ts.f_inputs.row(i) = x.transpose();
    Eigen::VectorXd fx = sys.f(x, no_control);
    for (Eigen::Index d = 0; d < sys.state_dim; ++d) fx[d] += w_std[d] * rng.normal();
    ts.f_targets.row(i) = fx.transpose();
    Eigen::VectorXd gx = sys.g(x);
    for (Eigen::Index e = 0; e < sys.meas_dim; ++e) gx[e] += v_std[e] * rng.normal();
    ts.g_inputs.row(i) = x.transpose();
    ts.g_targets.row(i) = gx.transpose();
  }
  return ts;
}

}  // namespace gpsmooth::systems
