#pragma once

#include "gpsmooth/systems/system.hpp"

namespace gpsmooth::systems {

// Frictionless rod pendulum, state [angular velocity, angle], angle measured
// anti-clockwise from hanging down. Torque is held over each step.
struct PendulumParams {
  double mass = 1.0;       // kg
  double length = 1.0;     // m
  double dt = 0.2;         // s
  double gravity = 9.82;   // m/s^2
  double sigma_w_angvel = 0.5;
  double sigma_w_angle = 0.1;
  double sigma_v = 0.05;
  double torque_min = -5.0;  // Nm
  double torque_max = 5.0;
  int substeps = 100;  // RK4 substeps per dt

  double inertia() const { return mass * length * length / 12.0; }
};

// One step of the dynamics (no noise): classical RK4 over dt with a held
// torque, clamped to the admissible range.
Eigen::VectorXd pendulum_f(const Eigen::VectorXd& x, double torque, const PendulumParams& p,
                           int substeps_override = 0);

// Bearing measurement; depends only on the angle. Quadrant-aware arctangent.
double pendulum_g(const Eigen::VectorXd& x, const PendulumParams& p);

// Total energy (kinetic + potential), conserved by the noise-free torque-free
// dynamics.
double pendulum_energy(const Eigen::VectorXd& x, const PendulumParams& p);

AnalyticSystem pendulum_system(const PendulumParams& p = {});

GaussianBelief pendulum_prior();

// Training states sampled uniformly inside the per-dimension envelope of a
// probe trajectory (simulated from a derived sub-seed) expanded by `margin`;
// torques uniform over the admissible range.
TrainingSet make_pendulum_training(int n, const PendulumParams& p, std::uint64_t seed,
                                   double margin = 1.0, int probe_steps = 30);

}  // namespace gpsmooth::systems
