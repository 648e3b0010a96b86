#include "gpsmooth/gp/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace gpsmooth::gp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return {};
  const Eigen::Index c = static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd m(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = parse_double(rows.at(static_cast<size_t>(i)).at(static_cast<size_t>(j)));
    }
  }
  return m;
}

}  // namespace

nlohmann::json model_to_json(const GPModel& model) {
  nlohmann::json doc;
  doc["schema"] = "gpsmooth-gp-model";
  doc["version"] = 1;
  doc["input_dim"] = model.input_dim();
  doc["output_dim"] = model.output_dim();
  doc["num_points"] = model.size();
  doc["inputs"] = matrix_to_json(model.inputs());
  doc["targets"] = matrix_to_json(model.targets());
  nlohmann::json hps = nlohmann::json::array();
  for (Eigen::Index a = 0; a < model.output_dim(); ++a) {
    const auto& hp = model.hyperparams(a);
    nlohmann::json h;
    h["signal_variance"] = format_double(hp.signal_variance);
    nlohmann::json ls = nlohmann::json::array();
    for (Eigen::Index d = 0; d < hp.length_scales.size(); ++d) {
      ls.push_back(format_double(hp.length_scales[d]));
    }
    h["length_scales"] = std::move(ls);
    h["noise_variance"] = format_double(hp.noise_variance);
    hps.push_back(std::move(h));
  }
  doc["hyperparams"] = std::move(hps);
  return doc;
}

GPModel model_from_json(const nlohmann::json& doc) {
  if (doc.value("schema", "") != "gpsmooth-gp-model") {
    throw ContractError("model_from_json: unexpected schema");
  }
  Eigen::MatrixXd X = matrix_from_json(doc.at("inputs"));
  Eigen::MatrixXd Y = matrix_from_json(doc.at("targets"));
  std::vector<SEHyperparams> hps;
  for (const auto& h : doc.at("hyperparams")) {
    SEHyperparams hp;
    hp.signal_variance = parse_double(h.at("signal_variance"));
    const auto& ls = h.at("length_scales");
    hp.length_scales.resize(static_cast<Eigen::Index>(ls.size()));
    for (Eigen::Index d = 0; d < hp.length_scales.size(); ++d) {
      hp.length_scales[d] = parse_double(ls.at(static_cast<size_t>(d)));
    }
    hp.noise_variance = parse_double(h.at("noise_variance"));
    hps.push_back(std::move(hp));
  }
  return GPModel::fit(std::move(X), std::move(Y), std::move(hps));
}

}  // namespace gpsmooth::gp
