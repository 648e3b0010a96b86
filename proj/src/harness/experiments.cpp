#include "gpsmooth/harness/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <thread>

#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/mm/moment_match.hpp"
#include "gpsmooth/smoothers/smoothers.hpp"

namespace gpsmooth::harness {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

namespace {

struct RunScore {
  double rmse = 0.0, mae = 0.0, nll = 0.0;
  bool completed = false;
};

// Aggregates per-run scores into a MetricsRow (streaming statistics).
MetricsRow aggregate(const std::string& name, const std::vector<RunScore>& scores) {
  MetricsRow row;
  row.estimator = name;
  RunningStats rmse, mae, nll;
  for (const auto& s : scores) {
    if (!s.completed) {
      ++row.failures;
      continue;
    }
    rmse.push(s.rmse);
    mae.push(s.mae);
    nll.push(s.nll);
  }
  row.runs = static_cast<int>(rmse.count());
  row.rmse = rmse.mean();
  row.mae = mae.mean();
  row.nll = nll.mean();
  row.rmse_se95 = rmse.stderr95();
  row.mae_se95 = mae.stderr95();
  row.nll_se95 = nll.stderr95();
  return row;
}

bool is_gp_estimator(const std::string& name) { return name.rfind("gp-", 0) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Kitagawa single-step robustness

ExperimentResult run_kitagawa(const ExperimentConfig& config) {
  const auto& kc = config.kitagawa;
  const systems::KitagawaParams params = kc.params;
  const systems::AnalyticSystem sys = systems::kitagawa_system(params);
  const double prior_var = kc.prior_std * kc.prior_std;
  const int train_size = config.training_sizes.empty() ? 100 : config.training_sizes.front();

  // GP estimators receive one model pair per invocation, shared across runs.
  std::shared_ptr<const filters::LearnedSystem> learned;
  for (const auto& est : config.estimators) {
    if (is_gp_estimator(est)) {
      const systems::TrainingSet ts = systems::make_kitagawa_training(
          train_size, params, kc.train_lo, kc.train_hi, derive_seed(config.seed, 101));
      gp::GPModel gp_f =
          gp::train_gp(ts.f_inputs, ts.f_targets, config.train_options(), derive_seed(config.seed, 102));
      gp::GPModel gp_g =
          gp::train_gp(ts.g_inputs, ts.g_targets, config.train_options(), derive_seed(config.seed, 103));
      learned = std::make_shared<const filters::LearnedSystem>(
          filters::LearnedSystem{std::move(gp_f), std::move(gp_g)});
      break;
    }
  }

  std::vector<std::string> names;
  std::vector<std::unique_ptr<filters::GaussianStepper>> steppers;  // null for pf
  for (const auto& est : config.estimators) {
    names.push_back(est);
    if (est == "gp-adf") {
      steppers.push_back(std::make_unique<filters::GpAdfFilter>(learned));
    } else if (est == "ekf") {
      steppers.push_back(std::make_unique<filters::EkfFilter>(sys));
    } else if (est == "ukf") {
      steppers.push_back(std::make_unique<filters::UkfFilter>(sys, config.ut));
    } else if (est == "ckf") {
      steppers.push_back(std::make_unique<filters::CkfFilter>(sys));
    } else if (est == "pf") {
      steppers.push_back(nullptr);
    } else {
      throw ContractError("kitagawa-step: unknown estimator '" + est + "'");
    }
  }

  const int E = static_cast<int>(names.size());
  const int R = config.runs;
  const int G = kc.grid_points;
  std::vector<std::vector<RunScore>> scores(static_cast<size_t>(E));
  for (auto& v : scores) v.resize(static_cast<size_t>(R));
  // per-(run, estimator, grid point) NLL; reduced in run order afterwards so
  // the traces do not depend on the thread schedule
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::MatrixXd> grid_nll(static_cast<size_t>(R),
                                        Eigen::MatrixXd::Constant(E, G, nan));

  parallel_for(R, config.threads, [&](int r) {
    Rng truth_rng(derive_seed(config.seed, 10000 + static_cast<std::uint64_t>(r)));
    std::vector<std::vector<double>> nlls(static_cast<size_t>(E));
    std::vector<std::vector<double>> errs(static_cast<size_t>(E));
    std::vector<bool> failed(static_cast<size_t>(E), false);

    for (int i = 0; i < G; ++i) {
      const double mu0 =
          G > 1 ? kc.grid_lo + (kc.grid_hi - kc.grid_lo) * i / static_cast<double>(G - 1)
                : kc.grid_lo;
      const double x0 = mu0 + kc.prior_std * truth_rng.normal();
      const double x1 = systems::kitagawa_f(x0) + params.sigma_w * truth_rng.normal();
      const double z1 = systems::kitagawa_g(x1) + params.sigma_v * truth_rng.normal();
      const GaussianBelief prior(Eigen::VectorXd::Constant(1, mu0),
                                 Eigen::MatrixXd::Constant(1, 1, prior_var));
      const Eigen::VectorXd z = Eigen::VectorXd::Constant(1, z1);
      const Eigen::VectorXd truth = Eigen::VectorXd::Constant(1, x1);
      const Eigen::VectorXd no_control(0);

      for (int e = 0; e < E; ++e) {
        if (failed[static_cast<size_t>(e)]) continue;
        try {
          GaussianBelief post;
          if (steppers[static_cast<size_t>(e)]) {
            post = steppers[static_cast<size_t>(e)]->step(prior, no_control, z).filtered;
          } else {
            filters::ParticleCloud cloud;
            cloud.particles.resize(config.pf.particles, 1);
            Rng pf_rng(derive_seed(config.seed,
                                   0x50000 + static_cast<std::uint64_t>(r) * 1000 +
                                       static_cast<std::uint64_t>(i)));
            for (int p = 0; p < config.pf.particles; ++p) {
              cloud.particles(p, 0) = mu0 + kc.prior_std * pf_rng.normal();
            }
            post = filters::sir_pf_step(sys, cloud, no_control, z, pf_rng);
          }
          const double nll = metric_nll(post, truth);
          nlls[static_cast<size_t>(e)].push_back(nll);
          errs[static_cast<size_t>(e)].push_back(post.mean[0] - x1);
          grid_nll[static_cast<size_t>(r)](e, i) = nll;
        } catch (const std::runtime_error&) {
          failed[static_cast<size_t>(e)] = true;
        }
      }
    }
    for (int e = 0; e < E; ++e) {
      RunScore& s = scores[static_cast<size_t>(e)][static_cast<size_t>(r)];
      if (failed[static_cast<size_t>(e)] || nlls[static_cast<size_t>(e)].empty()) continue;
      const auto& ns = nlls[static_cast<size_t>(e)];
      const auto& es = errs[static_cast<size_t>(e)];
      double sq = 0.0, ab = 0.0, nl = 0.0;
      for (std::size_t k = 0; k < ns.size(); ++k) {
        sq += es[k] * es[k];
        ab += std::abs(es[k]);
        nl += ns[k];
      }
      s.rmse = std::sqrt(sq / static_cast<double>(es.size()));
      s.mae = ab / static_cast<double>(es.size());
      s.nll = nl / static_cast<double>(ns.size());
      s.completed = true;
    }
  });

  ExperimentResult result;
  result.total_runs = R;
  for (int e = 0; e < E; ++e) {
    result.rows.push_back(aggregate(names[static_cast<size_t>(e)], scores[static_cast<size_t>(e)]));
    result.failed_estimator_runs += result.rows.back().failures;
    std::vector<double> trace;
    trace.reserve(static_cast<size_t>(G));
    for (int i = 0; i < G; ++i) {
      RunningStats st;
      for (int r = 0; r < R; ++r) {
        const double v = grid_nll[static_cast<size_t>(r)](e, i);
        if (std::isfinite(v)) st.push(v);
      }
      trace.push_back(st.mean());
    }
    result.nll_traces[names[static_cast<size_t>(e)]] = std::move(trace);
  }

  // Time-update diagnostic at prior N(0, prior_var): the true predictive
  // density (sampled) against each Gaussian filter's predictive moments.
  {
    nlohmann::json diag;
    const int bins = 401;
    const double lo = -25.0, hi = 25.0;
    Rng rng(derive_seed(config.seed, 0xD1A6));
    const int ns = 100000;
    std::vector<double> hist(static_cast<size_t>(bins), 0.0);
    for (int s = 0; s < ns; ++s) {
      const double x0 = kc.prior_std * rng.normal();
      const double x1 = systems::kitagawa_f(x0) + params.sigma_w * rng.normal();
      const int bin = static_cast<int>((x1 - lo) / (hi - lo) * bins);
      if (bin >= 0 && bin < bins) hist[static_cast<size_t>(bin)] += 1.0;
    }
    const double width = (hi - lo) / bins;
    nlohmann::json xs = nlohmann::json::array(), ts = nlohmann::json::array();
    for (int b = 0; b < bins; ++b) {
      xs.push_back(lo + (b + 0.5) * width);
      ts.push_back(hist[static_cast<size_t>(b)] / (ns * width));
    }
    diag["x"] = std::move(xs);
    diag["true_density"] = std::move(ts);
    const GaussianBelief prior0(Eigen::VectorXd::Zero(1),
                                Eigen::MatrixXd::Constant(1, 1, prior_var));
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd no_control(0);
    for (int e = 0; e < E; ++e) {
      if (!steppers[static_cast<size_t>(e)]) continue;
      const auto rec = steppers[static_cast<size_t>(e)]->step(prior0, no_control, z0);
      diag[names[static_cast<size_t>(e)]] = {{"mean", rec.predicted.mean[0]},
                                             {"var", rec.predicted.cov(0, 0)}};
    }
    result.density_grid = std::move(diag);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Pendulum tracking

namespace {

std::string smoother_name(const std::string& filter) {
  if (filter == "ekf") return "eks";
  if (filter == "ukf") return "urtss";
  if (filter == "ckf") return "cks";
  if (filter == "gp-adf") return "gp-rtss";
  return filter + "-smoothed";
}

RunScore score_beliefs(const std::vector<GaussianBelief>& beliefs, const Eigen::MatrixXd& states) {
  // beliefs[0] is the prior; score steps 1..T against the true states.
  RunScore s;
  double sq = 0.0, ab = 0.0, nl = 0.0;
  const Eigen::Index T = states.rows() - 1;
  for (Eigen::Index t = 1; t <= T; ++t) {
    const Eigen::VectorXd truth = states.row(t).transpose();
    const Eigen::VectorXd err = beliefs[static_cast<size_t>(t)].mean - truth;
    sq += err.squaredNorm();
    ab += err.cwiseAbs().sum();
    nl += metric_nll(beliefs[static_cast<size_t>(t)], truth);
  }
  const double steps = static_cast<double>(T) * static_cast<double>(states.cols());
  s.rmse = std::sqrt(sq / steps);
  s.mae = ab / steps;
  s.nll = nl / static_cast<double>(T);
  s.completed = true;
  return s;
}

}  // namespace

ExperimentResult run_pendulum(const ExperimentConfig& config) {
  const auto& pc = config.pendulum;
  const systems::AnalyticSystem sys = systems::pendulum_system(pc.params);
  const GaussianBelief prior = systems::pendulum_prior();
  const int T = pc.horizon;
  const int R = config.runs;

  // Row layout: for each estimator, a filter row and (Gaussian filters only)
  // a smoother row; GP estimators expand per training size.
  struct Task {
    std::string base;     // ekf, ukf, ckf, pf, gp-adf
    int train_size = 0;   // gp estimators only
    std::string filter_row;
    std::string smoother_row;  // empty for pf
  };
  std::vector<Task> tasks;
  for (const auto& est : config.estimators) {
    if (est == "gp-adf") {
      for (int nsz : config.training_sizes) {
        Task t;
        t.base = est;
        t.train_size = nsz;
        t.filter_row = est + "-" + std::to_string(nsz);
        t.smoother_row = smoother_name(est) + "-" + std::to_string(nsz);
        tasks.push_back(std::move(t));
      }
    } else if (est == "ekf" || est == "ukf" || est == "ckf") {
      tasks.push_back({est, 0, est, smoother_name(est)});
    } else if (est == "pf") {
      tasks.push_back({est, 0, est, ""});
    } else {
      throw ContractError("pendulum-track: unknown estimator '" + est + "'");
    }
  }

  const int K = static_cast<int>(tasks.size());
  std::vector<std::vector<RunScore>> filter_scores(static_cast<size_t>(K));
  std::vector<std::vector<RunScore>> smoother_scores(static_cast<size_t>(K));
  for (auto& v : filter_scores) v.resize(static_cast<size_t>(R));
  for (auto& v : smoother_scores) v.resize(static_cast<size_t>(R));
  // per-run traces, reduced in run order afterwards (schedule-independent)
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::MatrixXd> run_filter_trace(static_cast<size_t>(R),
                                                Eigen::MatrixXd::Constant(K, T, nan));
  std::vector<Eigen::MatrixXd> run_smoother_trace(static_cast<size_t>(R),
                                                  Eigen::MatrixXd::Constant(K, T, nan));

  parallel_for(R, config.threads, [&](int r) {
    const std::uint64_t run_seed = derive_seed(config.seed, 20000 + static_cast<std::uint64_t>(r));
    const systems::Trajectory traj = systems::simulate(sys, prior, T, derive_seed(run_seed, 1));

    // Train one model pair per requested size, shared by this run's GP rows.
    std::map<int, std::shared_ptr<const filters::LearnedSystem>> learned;
    for (const auto& task : tasks) {
      if (task.base != "gp-adf" || learned.count(task.train_size)) continue;
      try {
        const systems::TrainingSet ts = systems::make_pendulum_training(
            task.train_size, pc.params, derive_seed(run_seed, 100 + static_cast<std::uint64_t>(task.train_size)),
            pc.train_margin);
        gp::GPModel gp_f = gp::train_gp(ts.f_inputs, ts.f_targets, config.train_options(),
                                        derive_seed(run_seed, 210));
        gp::GPModel gp_g = gp::train_gp(ts.g_inputs, ts.g_targets, config.train_options(),
                                        derive_seed(run_seed, 220));
        learned[task.train_size] = std::make_shared<const filters::LearnedSystem>(
            filters::LearnedSystem{std::move(gp_f), std::move(gp_g)});
      } catch (const std::runtime_error&) {
        learned[task.train_size] = nullptr;  // training failure fails the run
      }
    }

    for (int k = 0; k < K; ++k) {
      const Task& task = tasks[static_cast<size_t>(k)];
      try {
        smoothers::EstimateSeries series;
        if (task.base == "gp-adf") {
          auto model = learned.at(task.train_size);
          if (!model) throw TrainingError("gp training failed", 0.0);
          const filters::GpAdfFilter f(model);
          series = filters::run_filter(f, prior, traj.measurements, traj.controls);
        } else if (task.base == "ekf") {
          series = filters::run_filter(filters::EkfFilter(sys), prior, traj.measurements,
                                       traj.controls);
        } else if (task.base == "ukf") {
          series = filters::run_filter(filters::UkfFilter(sys, config.ut), prior,
                                       traj.measurements, traj.controls);
        } else if (task.base == "ckf") {
          series = filters::run_filter(filters::CkfFilter(sys), prior, traj.measurements,
                                       traj.controls);
        } else {  // pf
          series = filters::run_particle_filter(sys, config.pf.particles, prior,
                                                traj.measurements, traj.controls,
                                                derive_seed(run_seed, 300));
        }
        filter_scores[static_cast<size_t>(k)][static_cast<size_t>(r)] =
            score_beliefs(series.filtered, traj.states);
        if (!task.smoother_row.empty()) {
          smoothers::rts_backward(series);
          smoother_scores[static_cast<size_t>(k)][static_cast<size_t>(r)] =
              score_beliefs(series.smoothed, traj.states);
        }
        for (int t = 1; t <= T; ++t) {
          const Eigen::VectorXd truth = traj.states.row(t).transpose();
          run_filter_trace[static_cast<size_t>(r)](k, t - 1) =
              metric_nll(series.filtered[static_cast<size_t>(t)], truth);
          if (!task.smoother_row.empty()) {
            run_smoother_trace[static_cast<size_t>(r)](k, t - 1) =
                metric_nll(series.smoothed[static_cast<size_t>(t)], truth);
          }
        }
      } catch (const std::runtime_error&) {
        // leaves completed=false for both rows of this task
      }
    }
  });

  auto reduce_trace = [&](const std::vector<Eigen::MatrixXd>& per_run, int k) {
    std::vector<double> trace;
    trace.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      RunningStats st;
      for (int r = 0; r < R; ++r) {
        const double v = per_run[static_cast<size_t>(r)](k, t);
        if (std::isfinite(v)) st.push(v);
      }
      trace.push_back(st.mean());
    }
    return trace;
  };

  ExperimentResult result;
  result.total_runs = R;
  for (int k = 0; k < K; ++k) {
    const Task& task = tasks[static_cast<size_t>(k)];
    result.rows.push_back(aggregate(task.filter_row, filter_scores[static_cast<size_t>(k)]));
    result.failed_estimator_runs += result.rows.back().failures;
    result.nll_traces[task.filter_row] = reduce_trace(run_filter_trace, k);
    if (!task.smoother_row.empty()) {
      result.rows.push_back(aggregate(task.smoother_row, smoother_scores[static_cast<size_t>(k)]));
      result.failed_estimator_runs += result.rows.back().failures;
      result.nll_traces[task.smoother_row] = reduce_trace(run_smoother_trace, k);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult run_linear_sanity(const ExperimentConfig& config) {
  ExperimentResult result;
  result.total_runs = 1;
  const int points = config.training_sizes.empty() ? 500 : config.training_sizes.front();
  result.checks = linear_sanity_checks(config.seed, points, std::min(config.gp.restarts, 4));
  const McSuiteResult mc = mc_moment_suite(12, 200000, derive_seed(config.seed, 77));
  CheckResult mc_row;
  mc_row.name = "mc moment suite fraction within 3se";
  mc_row.value = mc.fraction_within();
  mc_row.threshold = 0.95;
  mc_row.pass = mc_row.value >= mc_row.threshold;
  result.checks.push_back(mc_row);
  for (const auto& c : result.checks) {
    if (!c.pass) ++result.failed_estimator_runs;
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "kitagawa-step") return run_kitagawa(config);
  if (config.experiment == "pendulum-track") return run_pendulum(config);
  if (config.experiment == "linear-sanity") return run_linear_sanity(config);
  throw ContractError("unknown experiment: " + config.experiment);
}

}  // namespace gpsmooth::harness
