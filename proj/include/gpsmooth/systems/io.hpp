#pragma once

#include <json.hpp>
#include <string>

#include "gpsmooth/systems/system.hpp"

namespace gpsmooth::systems {

// One row per step: t, state..., measurement..., control...; measurement
// cells are empty at t=0 and control cells at t=T (none is defined there).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// One row per training pair: index, transition inputs, transition targets,
// measurement targets.
void write_training_set_csv(const std::string& path, const TrainingSet& ts);

void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace gpsmooth::systems
