#pragma once

#include <string>

#include "gpsmooth/harness/experiments.hpp"

namespace gpsmooth::harness {

// Writes results.csv (fixed header estimator,metric,value,stderr95,runs, one
// metric per line plus a completion line per estimator), the JSON manifest
// (config + seeds + library version + wall time), per-step NLL traces, the
// kitagawa predictive-density grid, and checks.csv for linear-sanity.
// Everything except the manifest's wall_time_seconds is byte-stable for a
// fixed (config, seed).
void emit_results(const ExperimentConfig& config, const ExperimentResult& result,
                  double wall_seconds);

}  // namespace gpsmooth::harness
