#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gpsmooth/gp/serialize.hpp"
#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/harness/emit.hpp"
#include "gpsmooth/harness/experiments.hpp"
#include "gpsmooth/simd/kernels.hpp"
#include "gpsmooth/systems/io.hpp"
#include "gpsmooth/systems/linear.hpp"
#include "gpsmooth/version.hpp"

namespace {

using namespace gpsmooth;

int cmd_run(const std::string& experiment, const std::string& config_path, int runs,
            std::uint64_t seed, bool seed_set, const std::string& estimators,
            const std::string& out_dir, bool paper_scale, int threads) {
  harness::ExperimentConfig config = config_path.empty()
                                         ? harness::default_config(experiment)
                                         : harness::load_config_file(config_path);
  if (!config_path.empty() && !experiment.empty() && config.experiment != experiment) {
    throw ContractError("config is for experiment '" + config.experiment + "', not '" +
                        experiment + "'");
  }
  if (paper_scale) {
    config.paper_scale = true;
    config.runs = 1000;
    if (config.experiment == "pendulum-track") config.training_sizes = {250, 20};
  }
  if (runs > 0) config.runs = runs;
  if (seed_set) config.seed = seed;
  if (threads > 0) config.threads = threads;
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (!estimators.empty()) {
    config.estimators.clear();
    std::string token;
    for (char ch : estimators + ",") {
      if (ch == ',') {
        if (!token.empty()) config.estimators.push_back(token);
        token.clear();
      } else {
        token += ch;
      }
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const harness::ExperimentResult result = harness::run_experiment(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  harness::emit_results(config, result, wall);

  for (const auto& row : result.rows) {
    std::printf("%-14s rmse %-12.5g mae %-12.5g nll %-12.5g (+-%.3g)  runs %d",
                row.estimator.c_str(), row.rmse, row.mae, row.nll, row.nll_se95, row.runs);
    if (row.failures > 0) std::printf("  FAILURES %d", row.failures);
    std::printf("\n");
  }
  for (const auto& c : result.checks) {
    std::printf("%-52s %12.5g  (threshold %.3g)  %s\n", c.name.c_str(), c.value, c.threshold,
                c.pass ? "pass" : "FAIL");
  }
  std::printf("results written to %s (wall %.1fs)\n", config.out_dir.c_str(), wall);
  return result.any_failures() ? 2 : 0;
}

int cmd_verify(std::uint64_t seed, int threads) {
  (void)threads;
  std::printf("gpsmooth %s verify (simd: %s)\n", GPSMOOTH_VERSION,
              simd::isa_name(simd::active()));
  bool all_pass = true;
  const auto checks = harness::linear_sanity_checks(seed);
  for (const auto& c : checks) {
    std::printf("  %-52s %12.5g  (threshold %.3g)  %s\n", c.name.c_str(), c.value, c.threshold,
                c.pass ? "pass" : "FAIL");
    all_pass = all_pass && c.pass;
  }
  const auto mc = harness::mc_moment_suite(12, 200000, derive_seed(seed, 77));
  const double frac = mc.fraction_within();
  const bool mc_pass = frac >= 0.95;
  std::printf("  %-52s %12.5g  (threshold %.3g)  %s  [worst z %.2f over %d comparisons]\n",
              "mc moment suite fraction within 3se", frac, 0.95, mc_pass ? "pass" : "FAIL",
              mc.worst_z, mc.comparisons);
  all_pass = all_pass && mc_pass;
  return all_pass ? 0 : 2;
}

int cmd_train(const std::string& system, int n, std::uint64_t seed, const std::string& out_path,
              int restarts, const std::string& dump_data) {
  systems::TrainingSet ts;
  nlohmann::json params;
  if (system == "kitagawa") {
    systems::KitagawaParams p;
    ts = systems::make_kitagawa_training(n, p, -10.0, 10.0, derive_seed(seed, 1));
    params = {{"sigma_w", p.sigma_w}, {"sigma_v", p.sigma_v}, {"train_lo", -10.0},
              {"train_hi", 10.0}};
  } else if (system == "pendulum") {
    systems::PendulumParams p;
    ts = systems::make_pendulum_training(n, p, derive_seed(seed, 1));
    params = {{"mass", p.mass}, {"length", p.length}, {"dt", p.dt}, {"gravity", p.gravity}};
  } else {
    throw ContractError("train: unknown system '" + system + "' (kitagawa|pendulum)");
  }
  gp::TrainOptions opts;
  opts.restarts = restarts;
  std::printf("training transition GP (%d points, %d targets)...\n", n,
              static_cast<int>(ts.f_targets.cols()));
  const gp::GPModel gp_f = gp::train_gp(ts.f_inputs, ts.f_targets, opts, derive_seed(seed, 2));
  std::printf("training measurement GP (%d points, %d targets)...\n", n,
              static_cast<int>(ts.g_targets.cols()));
  const gp::GPModel gp_g = gp::train_gp(ts.g_inputs, ts.g_targets, opts, derive_seed(seed, 3));

  nlohmann::json doc;
  doc["schema"] = "gpsmooth-system-models";
  doc["system"] = system;
  doc["seed"] = seed;
  doc["n"] = n;
  doc["params"] = params;
  doc["gp_f"] = gp::model_to_json(gp_f);
  doc["gp_g"] = gp::model_to_json(gp_g);
  systems::write_json_file(out_path, doc);
  if (!dump_data.empty()) {
    systems::write_training_set_csv(dump_data, ts);
  }
  std::printf("models written to %s\n", out_path.c_str());
  return 0;
}

int cmd_simulate(const std::string& system, int steps, std::uint64_t seed,
                 const std::string& out_dir) {
  systems::AnalyticSystem sys;
  GaussianBelief prior;
  nlohmann::json params;
  if (system == "kitagawa") {
    systems::KitagawaParams p;
    sys = systems::kitagawa_system(p);
    prior = GaussianBelief(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.25));
    params = {{"sigma_w", p.sigma_w}, {"sigma_v", p.sigma_v}};
  } else if (system == "pendulum") {
    systems::PendulumParams p;
    sys = systems::pendulum_system(p);
    prior = systems::pendulum_prior();
    params = {{"mass", p.mass},
              {"length", p.length},
              {"dt", p.dt},
              {"gravity", p.gravity},
              {"sigma_w_angvel", p.sigma_w_angvel},
              {"sigma_w_angle", p.sigma_w_angle},
              {"sigma_v", p.sigma_v}};
  } else {
    throw ContractError("simulate: unknown system '" + system + "' (kitagawa|pendulum)");
  }
  const systems::Trajectory traj = systems::simulate(sys, prior, steps, seed);
  std::filesystem::create_directories(out_dir);
  systems::write_trajectory_csv(out_dir + "/trajectory.csv", traj);
  nlohmann::json manifest = {{"system", system},
                             {"seed", seed},
                             {"steps", steps},
                             {"params", params},
                             {"library_version", GPSMOOTH_VERSION}};
  systems::write_json_file(out_dir + "/trajectory_manifest.json", manifest);
  std::printf("trajectory written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process filtering & smoothing benchmark suite"};
  app.set_version_flag("--version", GPSMOOTH_VERSION);
  app.require_subcommand(1);

  std::string experiment, config_path, estimators, out_dir, system, model_out = "model.json";
  std::string dump_data;
  int runs = 0, threads = 0, n_points = 250, steps = 30, restarts = 10;
  std::uint64_t seed = 12345;
  bool paper_scale = false;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("experiment", experiment, "kitagawa-step | pendulum-track | linear-sanity")
      ->required();
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--runs", runs, "override run count");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_option("--estimators", estimators, "comma-separated estimator list");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--paper-scale", paper_scale, "full-size protocol (1000 runs)");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* verify = app.add_subcommand("verify", "linear-sanity and Monte-Carlo oracle suites");
  verify->add_option("--seed", seed, "master seed");

  auto* train = app.add_subcommand("train", "train GP models for a system");
  train->add_option("--system", system, "kitagawa | pendulum")->required();
  train->add_option("-n", n_points, "training set size")->required();
  train->add_option("--seed", seed, "master seed");
  train->add_option("--out", model_out, "output model JSON path");
  train->add_option("--restarts", restarts, "evidence-maximization restarts");
  train->add_option("--dump-data", dump_data, "also write the training set CSV here");

  auto* sim = app.add_subcommand("simulate", "simulate and dump a trajectory");
  sim->add_option("--system", system, "kitagawa | pendulum")->required();
  sim->add_option("-T", steps, "number of steps");
  sim->add_option("--seed", seed, "seed");
  sim->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      return cmd_run(experiment, config_path, runs, seed, seed_opt->count() > 0, estimators,
                     out_dir, paper_scale, threads);
    }
    if (app.got_subcommand(verify)) return cmd_verify(seed, threads);
    if (app.got_subcommand(train)) {
      return cmd_train(system, n_points, seed, model_out, restarts, dump_data);
    }
    if (app.got_subcommand(sim)) return cmd_simulate(system, steps, seed, out_dir);
  } catch (const ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
