#include "gpsmooth/systems/io.hpp"

#include <fstream>

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/gp/serialize.hpp"

namespace gpsmooth::systems {

namespace {
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open for writing: " + path);
  return out;
}
}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t";
  for (Eigen::Index d = 0; d < traj.states.cols(); ++d) out << ",state_" << d;
  for (Eigen::Index e = 0; e < traj.measurements.cols(); ++e) out << ",meas_" << e;
  for (Eigen::Index u = 0; u < traj.controls.cols(); ++u) out << ",control_" << u;
  out << "\n";
  const Eigen::Index T = traj.measurements.rows();
  for (Eigen::Index t = 0; t <= T; ++t) {
    out << t;
    for (Eigen::Index d = 0; d < traj.states.cols(); ++d) {
      out << "," << gp::format_double_shortest(traj.states(t, d));
    }
    for (Eigen::Index e = 0; e < traj.measurements.cols(); ++e) {
      out << ",";
      if (t > 0) out << gp::format_double_shortest(traj.measurements(t - 1, e));
    }
    for (Eigen::Index u = 0; u < traj.controls.cols(); ++u) {
      out << ",";
      if (t < T) out << gp::format_double_shortest(traj.controls(t, u));
    }
    out << "\n";
  }
}

void write_training_set_csv(const std::string& path, const TrainingSet& ts) {
  auto out = open_out(path);
  out << "i";
  for (Eigen::Index d = 0; d < ts.f_inputs.cols(); ++d) out << ",f_input_" << d;
  for (Eigen::Index d = 0; d < ts.f_targets.cols(); ++d) out << ",f_target_" << d;
  for (Eigen::Index e = 0; e < ts.g_targets.cols(); ++e) out << ",g_target_" << e;
  out << "\n";
  for (Eigen::Index i = 0; i < ts.f_inputs.rows(); ++i) {
    out << i;
    for (Eigen::Index d = 0; d < ts.f_inputs.cols(); ++d) {
      out << "," << gp::format_double_shortest(ts.f_inputs(i, d));
    }
    for (Eigen::Index d = 0; d < ts.f_targets.cols(); ++d) {
      out << "," << gp::format_double_shortest(ts.f_targets(i, d));
    }
    for (Eigen::Index e = 0; e < ts.g_targets.cols(); ++e) {
      out << "," << gp::format_double_shortest(ts.g_targets(i, e));
    }
    out << "\n";
  }
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

}  // namespace gpsmooth::systems
