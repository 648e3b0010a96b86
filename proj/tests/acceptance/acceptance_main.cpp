// Acceptance suite: one pass/fail line per criterion, each criterion runnable
// alone via --criterion N. Exit code 0 iff every executed criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpsmooth/filters/filters.hpp"
#include "gpsmooth/gp/train.hpp"
#include "gpsmooth/harness/emit.hpp"
#include "gpsmooth/harness/experiments.hpp"
#include "gpsmooth/smoothers/smoothers.hpp"
#include "gpsmooth/systems/kitagawa.hpp"

using namespace gpsmooth;

namespace {

struct Criterion {
  bool pass = false;
  std::string summary;
  std::vector<std::string> detail;
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// --- 1: moment-matching Monte-Carlo oracle suite ---------------------------

Criterion criterion1() {
  const double t0 = now_seconds();
  const int instances = 50;
  const int samples = 1000000;
  std::vector<harness::McSuiteResult> per(static_cast<size_t>(instances));
  harness::parallel_for(instances, 0, [&](int k) {
    const auto inst = harness::random_mc_instance(derive_seed(9100, static_cast<std::uint64_t>(k)));
    const auto comps = harness::mc_check_moments(inst.model, inst.belief, samples,
                                                 derive_seed(9200, static_cast<std::uint64_t>(k)));
    auto& r = per[static_cast<size_t>(k)];
    for (const auto& c : comps) {
      ++r.comparisons;
      if (c.z <= 3.0) ++r.within3;
      r.worst_z = std::max(r.worst_z, c.z);
    }
  });
  harness::McSuiteResult total;
  for (const auto& r : per) {
    total.comparisons += r.comparisons;
    total.within3 += r.within3;
    total.worst_z = std::max(total.worst_z, r.worst_z);
  }
  const double elapsed = now_seconds() - t0;
  const double frac = total.fraction_within();
  Criterion c;
  c.pass = frac >= 0.95 && elapsed < 600.0;
  c.summary = fmt("moment-match MC oracle: %.1f%% of %d comparisons within 3 SE "
                  "(need >=95%%), worst z %.2f, %.0fs (limit 600s)",
                  100.0 * frac, total.comparisons, total.worst_z, elapsed);
  return c;
}

// --- 2: linear-system equivalence ------------------------------------------

Criterion criterion2() {
  const double t0 = now_seconds();
  const auto checks = harness::linear_sanity_checks(4001, 500, 4);
  Criterion c;
  c.pass = true;
  for (const auto& chk : checks) {
    c.pass = c.pass && chk.pass;
    c.detail.push_back(fmt("%-52s %11.3e (tol %.0e) %s", chk.name.c_str(), chk.value,
                           chk.threshold, chk.pass ? "ok" : "FAIL"));
  }
  const double elapsed = now_seconds() - t0;
  c.pass = c.pass && elapsed < 120.0;
  c.summary = fmt("Kalman/RTS equivalence (1e-10 analytic, 5e-2 learned), %.0fs (limit 120s)",
                  elapsed);
  return c;
}

// --- 3: Kitagawa desk scale -------------------------------------------------

double row_nll(const harness::ExperimentResult& r, const std::string& name) {
  for (const auto& row : r.rows) {
    if (row.estimator == name) return row.nll;
  }
  return std::nan("");
}

Criterion criterion3() {
  const double t0 = now_seconds();
  Criterion c;

  auto base = harness::default_config("kitagawa-step");  // 100 runs x 100 grid
  base.threads = 0;
  base.seed = 3001;
  const auto main_run = harness::run_kitagawa(base);
  const double gpadf = row_nll(main_run, "gp-adf");
  const double pf = row_nll(main_run, "pf");
  for (const auto& row : main_run.rows) {
    c.detail.push_back(fmt("seed 3001: %-8s nll %10.4g +- %.3g  rmse %8.4g  runs %d/%d",
                           row.estimator.c_str(), row.nll, row.nll_se95, row.rmse, row.runs,
                           row.runs + row.failures));
  }

  const bool band_ok = gpadf >= 1.5 && gpadf <= 3.0;

  int orderings = 0;
  for (std::uint64_t seed = 3001; seed <= 3005; ++seed) {
    harness::ExperimentResult r;
    if (seed == 3001) {
      r = main_run;
    } else {
      auto cfg = base;
      cfg.seed = seed;
      cfg.estimators = {"gp-adf", "ukf", "ckf", "ekf"};
      r = harness::run_kitagawa(cfg);
    }
    const double a = row_nll(r, "gp-adf"), u = row_nll(r, "ukf"), k = row_nll(r, "ckf"),
                 e = row_nll(r, "ekf");
    const bool ordered = a < u && u < k && k < e;
    if (ordered) ++orderings;
    c.detail.push_back(fmt("seed %llu ordering gp-adf<ukf<ckf<ekf: %10.4g / %10.4g / %10.4g / %10.4g  %s",
                           static_cast<unsigned long long>(seed), a, u, k, e,
                           ordered ? "ok" : "VIOLATED"));
  }

  double gaussians_min = std::min(std::min(row_nll(main_run, "gp-adf"), row_nll(main_run, "ukf")),
                                  std::min(row_nll(main_run, "ckf"), row_nll(main_run, "ekf")));
  const bool pf_ok = pf < gaussians_min;
  c.detail.push_back(fmt("SIR PF (200 particles) nll %10.4g vs best Gaussian %10.4g: %s", pf,
                         gaussians_min, pf_ok ? "below (ok)" : "NOT below"));

  // Diagnostic mirror of the harness example: a 1e5-particle PF preserves the
  // ordering even at desk scale. Not gating.
  {
    auto diag = base;
    diag.estimators = {"pf"};
    diag.pf.particles = 100000;
    diag.runs = 20;
    diag.seed = 3001;
    const auto r = harness::run_kitagawa(diag);
    c.detail.push_back(fmt("diagnostic: PF with 1e5 particles (20 runs) nll %10.4g (%s best Gaussian)",
                           row_nll(r, "pf"),
                           row_nll(r, "pf") < gaussians_min ? "below" : "not below"));
  }

  const double elapsed = now_seconds() - t0;
  c.pass = band_ok && orderings >= 4 && pf_ok && elapsed < 900.0;
  c.summary = fmt("kitagawa desk scale: gp-adf nll %.3g in [1.5,3.0] %s; ordering %d/5 seeds "
                  "(need >=4); pf(200) below all Gaussians %s; %.0fs (limit 900s)",
                  gpadf, band_ok ? "ok" : "FAIL", orderings, pf_ok ? "ok" : "FAIL", elapsed);
  return c;
}

// --- 4: pendulum desk scale --------------------------------------------------

Criterion criterion4() {
  const double t0 = now_seconds();
  auto cfg = harness::default_config("pendulum-track");  // 50 runs, n=250, T=30
  cfg.seed = 4100;
  cfg.threads = 0;
  const auto r = harness::run_pendulum(cfg);
  Criterion c;
  for (const auto& row : r.rows) {
    c.detail.push_back(fmt("%-12s nll_x %10.4g +- %-8.3g runs %d/%d", row.estimator.c_str(),
                           row.nll, row.nll_se95, row.runs, row.runs + row.failures));
  }
  const double gpadf = row_nll(r, "gp-adf-250");
  const double gprtss = row_nll(r, "gp-rtss-250");
  const bool improves = gprtss < gpadf;
  const bool band = gpadf >= 0.8 && gpadf <= 2.5;
  bool degrade = true;
  for (const auto& [f, s] : {std::pair<std::string, std::string>{"ekf", "eks"},
                             {"ukf", "urtss"},
                             {"ckf", "cks"}}) {
    const double fn = row_nll(r, f), sn = row_nll(r, s);
    const bool ok = sn >= fn;
    degrade = degrade && ok;
    c.detail.push_back(fmt("degradation %s(%.4g) -> %s(%.4g): %s", f.c_str(), fn, s.c_str(), sn,
                           ok ? "smoother >= filter (ok)" : "VIOLATED"));
  }
  const double elapsed = now_seconds() - t0;
  c.pass = improves && band && degrade && elapsed < 3600.0;
  c.summary = fmt("pendulum desk scale: gp-rtss %.3g < gp-adf %.3g %s; gp-adf in [0.8,2.5] %s; "
                  "baseline smoothers degrade %s; %.0fs (limit 3600s)",
                  gprtss, gpadf, improves ? "ok" : "FAIL", band ? "ok" : "FAIL",
                  degrade ? "ok" : "FAIL", elapsed);
  return c;
}

// --- 5: evidence gradients ---------------------------------------------------

Criterion criterion5() {
  const double t0 = now_seconds();
  Rng rng(5100);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Eigen::Index D = 1 + inst % 3;
    Eigen::MatrixXd X(8, D);
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index d = 0; d < D; ++d) X(i, d) = 1.3 * rng.normal();
    }
    const Eigen::VectorXd y = rng.normal_vector(8);
    Eigen::VectorXd t(D + 2);
    for (Eigen::Index j = 0; j < D; ++j) t[j] = rng.uniform(-0.5, 0.7);
    t[D] = rng.uniform(-0.5, 0.5);
    t[D + 1] = rng.uniform(-2.0, -0.5);
    auto hp_at = [&](const Eigen::VectorXd& tt) {
      gp::SEHyperparams hp;
      hp.length_scales = tt.head(D).array().exp().matrix();
      hp.signal_variance = std::exp(2.0 * tt[D]);
      hp.noise_variance = std::exp(2.0 * tt[D + 1]);
      return hp;
    };
    const auto ev = gp::log_evidence(X, y, hp_at(t));
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < D + 2; ++j) {
      Eigen::VectorXd tp = t, tm = t;
      tp[j] += h;
      tm[j] -= h;
      const double fd =
          (gp::log_evidence(X, y, hp_at(tp)).value - gp::log_evidence(X, y, hp_at(tm)).value) /
          (2.0 * h);
      worst = std::max(worst, std::abs(ev.grad[j] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  const double elapsed = now_seconds() - t0;
  Criterion c;
  c.pass = worst < 1e-5 && elapsed < 60.0;
  c.summary = fmt("evidence gradient vs central differences: worst rel err %.2e "
                  "(tol 1e-5) over 20 instances, %.0fs (limit 60s)",
                  worst, elapsed);
  return c;
}

// --- 6: random-feature correspondence ---------------------------------------

Criterion criterion6() {
  const double t0 = now_seconds();
  const int basis = 2000, draws = 5000;
  const double lo = -20.0, hi = 21.0, lambda = 1.0;
  const double ds = (hi - lo) / basis;
  Eigen::VectorXd test_x(9);
  test_x << -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2;
  Eigen::MatrixXd B(test_x.size(), basis);
  for (Eigen::Index j = 0; j < basis; ++j) {
    const double center = lo + (j + 0.5) * ds;
    for (Eigen::Index i = 0; i < test_x.size(); ++i) {
      const double d = test_x[i] - center;
      B(i, j) = std::exp(-d * d / (lambda * lambda));
    }
  }
  Rng rng(6100);
  Eigen::MatrixXd H(draws, test_x.size());
  for (int s = 0; s < draws; ++s) {
    H.row(s) = (std::sqrt(ds) * (B * rng.normal_vector(basis))).transpose();
  }
  const double alpha2 = lambda * std::sqrt(M_PI / 2.0);
  const Eigen::RowVectorXd mean = H.colwise().mean();
  const Eigen::MatrixXd Hc = H.rowwise() - mean;
  double worst_z = 0.0;
  int comparisons = 0, within = 0;
  for (Eigen::Index i = 0; i < test_x.size(); ++i) {
    const double se = std::sqrt(Hc.col(i).squaredNorm() / (draws - 1.0) / draws);
    const double z = std::abs(mean[i]) / se;
    worst_z = std::max(worst_z, z);
    ++comparisons;
    if (z <= 3.0) ++within;
    for (Eigen::Index j = i; j < test_x.size(); ++j) {
      const Eigen::ArrayXd prod = Hc.col(i).array() * Hc.col(j).array();
      const double est = prod.mean();
      const double se_cov =
          std::sqrt((prod - est).square().sum() / (draws - 1.0)) / std::sqrt((double)draws);
      const double dx = test_x[i] - test_x[j];
      const double expect = alpha2 * std::exp(-dx * dx / (2.0 * lambda * lambda));
      const double zc = std::abs(est - expect) / se_cov;
      worst_z = std::max(worst_z, zc);
      ++comparisons;
      if (zc <= 3.0) ++within;
    }
  }
  const double elapsed = now_seconds() - t0;
  Criterion c;
  c.pass = within == comparisons && elapsed < 120.0;
  c.summary = fmt("random-feature prior vs SE kernel: %d/%d within 3 SE, worst z %.2f, "
                  "%.0fs (limit 120s)",
                  within, comparisons, worst_z, elapsed);
  return c;
}

// --- 7: UT degeneracy diagnostic ---------------------------------------------

Criterion criterion7() {
  const double t0 = now_seconds();
  const systems::KitagawaParams kp;
  const GaussianBelief prior(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.25));
  const auto ut = filters::unscented_transform(
      prior,
      [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, systems::kitagawa_f(x[0]));
      },
      1, filters::UtParams{});
  const double ut_var = ut.cov(0, 0) + kp.sigma_w * kp.sigma_w;

  Rng rng(7100);
  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> x1s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x1 = systems::kitagawa_f(0.5 * rng.normal()) + kp.sigma_w * rng.normal();
    x1s[static_cast<size_t>(i)] = x1;
    sum += x1;
    sumsq += x1 * x1;
  }
  const double mc_var = sumsq / n - (sum / n) * (sum / n);

  // Measurement-stage diagnostic (the dramatic panel of the degeneracy).
  const GaussianBelief tu(ut.mean, Eigen::MatrixXd::Constant(1, 1, ut_var));
  const auto utz = filters::unscented_transform(
      tu,
      [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, systems::kitagawa_g(x[0]));
      },
      1, filters::UtParams{});
  const double utz_var = utz.cov(0, 0) + kp.sigma_v * kp.sigma_v;
  double zsum = 0.0, zsumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = systems::kitagawa_g(x1s[static_cast<size_t>(i)]) + kp.sigma_v * rng.normal();
    zsum += z;
    zsumsq += z * z;
  }
  const double mcz_var = zsumsq / n - (zsum / n) * (zsum / n);

  const double elapsed = now_seconds() - t0;
  Criterion c;
  c.pass = ut_var < 0.5 * mc_var && elapsed < 60.0;
  c.summary = fmt("UT time-update variance %.4g vs 1e6-sample MC %.4g (ratio %.2f, need <0.5); "
                  "%.0fs (limit 60s)",
                  ut_var, mc_var, ut_var / mc_var, elapsed);
  c.detail.push_back(fmt("measurement-stage diagnostic: UT %.4g vs MC %.4g (ratio %.3f)",
                         utz_var, mcz_var, utz_var / mcz_var));
  return c;
}

// --- 8: CLI determinism -------------------------------------------------------

std::string g_cli_path;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_cli(const std::string& args) {
  const std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

Criterion criterion8() {
  Criterion c;
  if (g_cli_path.empty()) {
    c.summary = "determinism: --cli <path to gpsmooth binary> not given";
    return c;
  }
  const auto base = std::filesystem::temp_directory_path() / "gpsmooth_accept8";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);

  // small but representative config: a learned estimator, a sigma-point
  // baseline, and the particle filter
  const auto cfg_path = base / "cfg.json";
  {
    auto cfg = harness::default_config("kitagawa-step");
    cfg.estimators = {"gp-adf", "ukf", "pf"};
    cfg.runs = 2;
    cfg.kitagawa.grid_points = 10;
    cfg.training_sizes = {30};
    cfg.gp.restarts = 3;
    cfg.seed = 8100;
    std::ofstream out(cfg_path);
    out << harness::config_to_json(cfg).dump(2) << "\n";
  }

  bool ok = true;
  auto check_same = [&](const std::filesystem::path& a, const std::filesystem::path& b,
                        const std::string& what) {
    const bool same = slurp(a) == slurp(b);
    c.detail.push_back(what + (same ? ": byte-identical" : ": DIFFERS"));
    ok = ok && same;
  };

  // identical invocation twice; snapshot the first run's files in between
  for (int rep = 1; rep <= 2; ++rep) {
    const auto out = base / "run_out";
    if (!run_cli("run kitagawa-step --config " + cfg_path.string() + " --out " + out.string())) {
      c.summary = "determinism: CLI run failed";
      return c;
    }
    std::filesystem::copy(out, base / ("run" + std::to_string(rep)),
                          std::filesystem::copy_options::recursive);
  }
  check_same(base / "run1/results.csv", base / "run2/results.csv", "run: results.csv");
  check_same(base / "run1/nll_per_step.csv", base / "run2/nll_per_step.csv",
             "run: nll_per_step.csv");
  check_same(base / "run1/predictive_density.csv", base / "run2/predictive_density.csv",
             "run: predictive_density.csv");
  {
    nlohmann::json m1, m2;
    std::ifstream(base / "run1/manifest.json") >> m1;
    std::ifstream(base / "run2/manifest.json") >> m2;
    m1.erase("wall_time_seconds");
    m2.erase("wall_time_seconds");
    const bool same = m1.dump() == m2.dump();
    c.detail.push_back(std::string("run: manifest.json modulo wall_time_seconds") +
                       (same ? ": identical" : ": DIFFERS"));
    ok = ok && same;
  }

  for (int rep = 1; rep <= 2; ++rep) {
    const auto out = base / ("sim" + std::to_string(rep));
    if (!run_cli("simulate --system pendulum -T 10 --seed 8200 --out " + out.string())) {
      c.summary = "determinism: CLI simulate failed";
      return c;
    }
  }
  check_same(base / "sim1/trajectory.csv", base / "sim2/trajectory.csv", "simulate: trajectory.csv");
  check_same(base / "sim1/trajectory_manifest.json", base / "sim2/trajectory_manifest.json",
             "simulate: manifest");

  for (int rep = 1; rep <= 2; ++rep) {
    const auto out = base / ("model" + std::to_string(rep) + ".json");
    if (!run_cli("train --system kitagawa -n 20 --restarts 2 --seed 8300 --out " + out.string())) {
      c.summary = "determinism: CLI train failed";
      return c;
    }
  }
  check_same(base / "model1.json", base / "model2.json", "train: model.json");

  std::filesystem::remove_all(base);
  c.pass = ok;
  c.summary = std::string("CLI determinism across run/simulate/train reruns: ") +
              (ok ? "byte-identical results" : "MISMATCH");
  return c;
}

// --- 9: complexity scaling ----------------------------------------------------

filters::LearnedSystem fixed_models(int n, std::uint64_t seed) {
  const systems::KitagawaParams kp;
  const auto ts = systems::make_kitagawa_training(n, kp, -10.0, 10.0, seed);
  gp::SEHyperparams hp;
  hp.length_scales = Eigen::VectorXd::Constant(1, 1.5);
  hp.signal_variance = 30.0;
  hp.noise_variance = 0.04;
  gp::SEHyperparams hpg = hp;
  hpg.signal_variance = 12.0;
  return filters::LearnedSystem{gp::GPModel::fit(ts.f_inputs, ts.f_targets, {hp}),
                                gp::GPModel::fit(ts.g_inputs, ts.g_targets, {hpg})};
}

double time_gp_rtss(const filters::LearnedSystem& learned, const systems::Trajectory& traj,
                    const GaussianBelief& prior, int reps) {
  double best = 1e300;
  for (int rep = 0; rep < reps; ++rep) {
    const double t0 = now_seconds();
    const auto series = smoothers::gp_rtss(learned, prior, traj.measurements, traj.controls);
    best = std::min(best, now_seconds() - t0);
    if (series.smoothed.empty()) std::abort();
  }
  return best;
}

Criterion criterion9() {
  const double t0 = now_seconds();
  const GaussianBelief prior(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.25));
  const auto sys = systems::kitagawa_system();

  // Linear in the horizon at fixed n.
  const auto learned = fixed_models(100, 9100);
  std::vector<double> ts_list, times;
  for (int T : {10, 20, 40, 80, 160, 320}) {
    const auto traj = systems::simulate(sys, prior, T, 9200 + static_cast<std::uint64_t>(T));
    ts_list.push_back(static_cast<double>(T));
    times.push_back(time_gp_rtss(learned, traj, prior, 5));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(ts_list.size());
  for (int i = 0; i < m; ++i) {
    sx += ts_list[i];
    sy += times[i];
    sxx += ts_list[i] * ts_list[i];
    sxy += ts_list[i] * times[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < m; ++i) {
    const double pred = intercept + slope * ts_list[i];
    ss_res += (times[i] - pred) * (times[i] - pred);
    ss_tot += (times[i] - sy / m) * (times[i] - sy / m);
  }
  const double r2 = 1.0 - ss_res / ss_tot;

  // At most quadratic in the training size at fixed horizon.
  std::vector<double> ns, tn;
  for (int n : {25, 50, 100, 200, 400}) {
    const auto models = fixed_models(n, 9300 + static_cast<std::uint64_t>(n));
    const auto traj = systems::simulate(sys, prior, 30, 9400);
    ns.push_back(std::log(static_cast<double>(n)));
    tn.push_back(std::log(time_gp_rtss(models, traj, prior, 5)));
  }
  double nx = 0, ny = 0, nxx = 0, nxy = 0;
  const int k = static_cast<int>(ns.size());
  for (int i = 0; i < k; ++i) {
    nx += ns[i];
    ny += tn[i];
    nxx += ns[i] * ns[i];
    nxy += ns[i] * tn[i];
  }
  const double exponent = (k * nxy - nx * ny) / (k * nxx - nx * nx);

  const double elapsed = now_seconds() - t0;
  Criterion c;
  c.pass = r2 > 0.99 && exponent <= 2.25;
  c.summary = fmt("complexity scaling: time vs T linear fit R^2 %.4f (need >0.99); "
                  "log-log exponent vs n %.2f (need <=2.25); %.0fs",
                  r2, exponent, elapsed);
  for (int i = 0; i < m; ++i) {
    c.detail.push_back(fmt("T=%4.0f  %8.2f ms", ts_list[i], 1000.0 * times[i]));
  }
  for (int i = 0; i < k; ++i) {
    c.detail.push_back(fmt("n=%4.0f  %8.2f ms", std::exp(ns[i]), 1000.0 * std::exp(tn[i])));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (arg == "--cli" && i + 1 < argc) g_cli_path = argv[++i];
  }

  using Fn = Criterion (*)();
  const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9};
  bool all_pass = true;
  for (int i = 0; i < 9; ++i) {
    if (only != 0 && only != i + 1) continue;
    const Criterion c = criteria[i]();
    std::printf("[%s] criterion %d: %s\n", c.pass ? "PASS" : "FAIL", i + 1, c.summary.c_str());
    for (const auto& line : c.detail) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}
