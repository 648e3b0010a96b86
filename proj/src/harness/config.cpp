#include "gpsmooth/harness/config.hpp"

#include <fstream>

#include "gpsmooth/core/errors.hpp"

namespace gpsmooth::harness {

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "kitagawa-step") {
    c.estimators = {"gp-adf", "ukf", "ckf", "ekf", "pf"};
    c.runs = 100;
    c.training_sizes = {100};
  } else if (experiment == "pendulum-track") {
    c.estimators = {"gp-adf", "ukf", "ckf", "ekf"};
    c.runs = 50;
    c.training_sizes = {250};
    c.gp.restarts = 5;  // three 250-point models per run; 10 restarts is paper-scale budget
    c.gp.max_iters = 100;
  } else if (experiment == "linear-sanity") {
    c.estimators = {};
    c.runs = 1;
    c.training_sizes = {500};
  } else {
    throw ContractError("unknown experiment: " + experiment);
  }
  return c;
}

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.contains("experiment")) throw ContractError("config: missing 'experiment'");
  ExperimentConfig c = default_config(doc.at("experiment").get<std::string>());
  read_if(doc, "estimators", c.estimators);
  read_if(doc, "runs", c.runs);
  read_if(doc, "training_sizes", c.training_sizes);
  read_if(doc, "seed", c.seed);
  read_if(doc, "out_dir", c.out_dir);
  read_if(doc, "paper_scale", c.paper_scale);
  read_if(doc, "threads", c.threads);
  if (doc.contains("kitagawa")) {
    const auto& k = doc.at("kitagawa");
    read_if(k, "sigma_w", c.kitagawa.params.sigma_w);
    read_if(k, "sigma_v", c.kitagawa.params.sigma_v);
    read_if(k, "prior_std", c.kitagawa.prior_std);
    read_if(k, "grid_lo", c.kitagawa.grid_lo);
    read_if(k, "grid_hi", c.kitagawa.grid_hi);
    read_if(k, "grid_points", c.kitagawa.grid_points);
    read_if(k, "train_lo", c.kitagawa.train_lo);
    read_if(k, "train_hi", c.kitagawa.train_hi);
  }
  if (doc.contains("pendulum")) {
    const auto& p = doc.at("pendulum");
    read_if(p, "mass", c.pendulum.params.mass);
    read_if(p, "length", c.pendulum.params.length);
    read_if(p, "dt", c.pendulum.params.dt);
    read_if(p, "gravity", c.pendulum.params.gravity);
    read_if(p, "sigma_w_angvel", c.pendulum.params.sigma_w_angvel);
    read_if(p, "sigma_w_angle", c.pendulum.params.sigma_w_angle);
    read_if(p, "sigma_v", c.pendulum.params.sigma_v);
    read_if(p, "torque_min", c.pendulum.params.torque_min);
    read_if(p, "torque_max", c.pendulum.params.torque_max);
    read_if(p, "substeps", c.pendulum.params.substeps);
    read_if(p, "train_margin", c.pendulum.train_margin);
    read_if(p, "horizon", c.pendulum.horizon);
  }
  if (doc.contains("ut")) {
    const auto& u = doc.at("ut");
    read_if(u, "alpha", c.ut.alpha);
    read_if(u, "beta", c.ut.beta);
    read_if(u, "kappa", c.ut.kappa);
  }
  if (doc.contains("pf")) read_if(doc.at("pf"), "particles", c.pf.particles);
  if (doc.contains("gp")) {
    read_if(doc.at("gp"), "restarts", c.gp.restarts);
    read_if(doc.at("gp"), "max_iters", c.gp.max_iters);
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  doc["experiment"] = c.experiment;
  doc["estimators"] = c.estimators;
  doc["runs"] = c.runs;
  doc["training_sizes"] = c.training_sizes;
  doc["seed"] = c.seed;
  doc["out_dir"] = c.out_dir;
  doc["paper_scale"] = c.paper_scale;
  doc["threads"] = c.threads;
  doc["kitagawa"] = {{"sigma_w", c.kitagawa.params.sigma_w},
                     {"sigma_v", c.kitagawa.params.sigma_v},
                     {"prior_std", c.kitagawa.prior_std},
                     {"grid_lo", c.kitagawa.grid_lo},
                     {"grid_hi", c.kitagawa.grid_hi},
                     {"grid_points", c.kitagawa.grid_points},
                     {"train_lo", c.kitagawa.train_lo},
                     {"train_hi", c.kitagawa.train_hi}};
  doc["pendulum"] = {{"mass", c.pendulum.params.mass},
                     {"length", c.pendulum.params.length},
                     {"dt", c.pendulum.params.dt},
                     {"gravity", c.pendulum.params.gravity},
                     {"sigma_w_angvel", c.pendulum.params.sigma_w_angvel},
                     {"sigma_w_angle", c.pendulum.params.sigma_w_angle},
                     {"sigma_v", c.pendulum.params.sigma_v},
                     {"torque_min", c.pendulum.params.torque_min},
                     {"torque_max", c.pendulum.params.torque_max},
                     {"substeps", c.pendulum.params.substeps},
                     {"train_margin", c.pendulum.train_margin},
                     {"horizon", c.pendulum.horizon}};
  doc["ut"] = {{"alpha", c.ut.alpha}, {"beta", c.ut.beta}, {"kappa", c.ut.kappa}};
  doc["pf"] = {{"particles", c.pf.particles}};
  doc["gp"] = {{"restarts", c.gp.restarts}, {"max_iters", c.gp.max_iters}};
  return doc;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ContractError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace gpsmooth::harness
