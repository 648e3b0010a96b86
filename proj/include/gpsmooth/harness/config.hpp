#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gpsmooth/filters/filters.hpp"
#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/systems/kitagawa.hpp"
#include "gpsmooth/systems/pendulum.hpp"

namespace gpsmooth::harness {

struct KitagawaConfig {
  systems::KitagawaParams params;
  double prior_std = 0.5;
  double grid_lo = -3.0;
  double grid_hi = 3.0;
  int grid_points = 100;
  double train_lo = -10.0;
  double train_hi = 10.0;
};

struct PendulumConfig {
  systems::PendulumParams params;
  double train_margin = 1.0;
  int horizon = 30;
};

struct GpTrainConfig {
  int restarts = 10;
  int max_iters = 150;
};

struct PfConfig {
  int particles = 200;
};

// Fully serializable experiment description; a persisted config reproduces
// its results byte for byte.
struct ExperimentConfig {
  std::string experiment;  // kitagawa-step | pendulum-track | linear-sanity
  std::vector<std::string> estimators;
  int runs = 0;
  std::vector<int> training_sizes;
  std::uint64_t seed = 12345;
  std::string out_dir = "results";
  bool paper_scale = false;
  int threads = 0;  // 0 = hardware concurrency

  KitagawaConfig kitagawa;
  PendulumConfig pendulum;
  filters::UtParams ut;
  PfConfig pf;
  GpTrainConfig gp;

  gp::TrainOptions train_options() const {
    gp::TrainOptions o;
    o.restarts = gp.restarts;
    o.max_iters = gp.max_iters;
    return o;
  }
};

ExperimentConfig default_config(const std::string& experiment);

// Loads a config (or a manifest, whose extra keys are ignored).
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path);

}  // namespace gpsmooth::harness
