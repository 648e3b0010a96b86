#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "gpsmooth/harness/config.hpp"
#include "gpsmooth/harness/metrics.hpp"
#include "gpsmooth/harness/validation.hpp"

namespace gpsmooth::harness {

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::vector<CheckResult> checks;  // linear-sanity only
  // estimator -> per-step (pendulum) or per-grid-point (kitagawa) mean NLL
  std::map<std::string, std::vector<double>> nll_traces;
  nlohmann::json density_grid;  // kitagawa time-update diagnostic
  int total_runs = 0;
  int failed_estimator_runs = 0;

  bool any_failures() const { return failed_estimator_runs > 0; }
};

ExperimentResult run_kitagawa(const ExperimentConfig& config);
ExperimentResult run_pendulum(const ExperimentConfig& config);
ExperimentResult run_linear_sanity(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Bounded worker pool; fn(i) must handle its own failures. Results must not
// depend on scheduling (each index has its own derived seed).
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace gpsmooth::harness
