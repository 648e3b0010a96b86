#include "gpsmooth/harness/emit.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gpsmooth/core/errors.hpp"
#include "gpsmooth/gp/serialize.hpp"
#include "gpsmooth/version.hpp"

namespace gpsmooth::harness {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open for writing: " + path.string());
  return out;
}

std::string fmt(double v) { return gp::format_double_shortest(v); }

}  // namespace

void emit_results(const ExperimentConfig& config, const ExperimentResult& result,
                  double wall_seconds) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);

  {
    auto out = open_out(dir / "results.csv");
    out << "estimator,metric,value,stderr95,runs\n";
    for (const auto& row : result.rows) {
      out << row.estimator << ",rmse," << fmt(row.rmse) << "," << fmt(row.rmse_se95) << ","
          << row.runs << "\n";
      out << row.estimator << ",mae," << fmt(row.mae) << "," << fmt(row.mae_se95) << ","
          << row.runs << "\n";
      out << row.estimator << ",nll," << fmt(row.nll) << "," << fmt(row.nll_se95) << ","
          << row.runs << "\n";
      const int total = row.runs + row.failures;
      const double rate = total > 0 ? static_cast<double>(row.runs) / total : 1.0;
      out << row.estimator << ",completion," << fmt(rate) << "," << fmt(0.0) << "," << total
          << "\n";
    }
  }

  {
    nlohmann::json manifest = config_to_json(config);
    manifest["library_version"] = GPSMOOTH_VERSION;
    manifest["wall_time_seconds"] = wall_seconds;
    manifest["total_runs"] = result.total_runs;
    manifest["failed_estimator_runs"] = result.failed_estimator_runs;
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

  if (!result.nll_traces.empty()) {
    const char* index_name =
        config.experiment == "kitagawa-step" ? "grid_point" : "step";
    auto out = open_out(dir / "nll_per_step.csv");
    out << "estimator," << index_name << ",mean_nll\n";
    for (const auto& [name, trace] : result.nll_traces) {
      for (std::size_t i = 0; i < trace.size(); ++i) {
        out << name << "," << (i + 1) << "," << fmt(trace[i]) << "\n";
      }
    }
  }

  if (!result.density_grid.is_null()) {
    // Gridded true predictive density next to each Gaussian approximation.
    const auto& grid = result.density_grid;
    std::vector<std::string> estimators;
    for (auto it = grid.begin(); it != grid.end(); ++it) {
      if (it.key() != "x" && it.key() != "true_density") estimators.push_back(it.key());
    }
    auto out = open_out(dir / "predictive_density.csv");
    out << "x,true_density";
    for (const auto& e : estimators) out << "," << e;
    out << "\n";
    const auto& xs = grid.at("x");
    const auto& ts = grid.at("true_density");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs.at(i).get<double>();
      out << fmt(x) << "," << fmt(ts.at(i).get<double>());
      for (const auto& e : estimators) {
        const double mean = grid.at(e).at("mean").get<double>();
        const double var = grid.at(e).at("var").get<double>();
        const double dens =
            std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * M_PI * var);
        out << "," << fmt(dens);
      }
      out << "\n";
    }
  }

  if (!result.checks.empty()) {
    auto out = open_out(dir / "checks.csv");
    out << "name,value,threshold,pass\n";
    for (const auto& c : result.checks) {
      out << c.name << "," << fmt(c.value) << "," << fmt(c.threshold) << ","
          << (c.pass ? "1" : "0") << "\n";
    }
  }
}

}  // namespace gpsmooth::harness
