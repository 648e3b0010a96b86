#pragma once

#include <json.hpp>

#include "gpsmooth/gp/model.hpp"

namespace gpsmooth::gp {

// Model as a single JSON document. All reals are decimal strings with 17
// significant digits so values round-trip exactly; beta and the Gram
// factorizations are recomputed on load.
nlohmann::json model_to_json(const GPModel& model);
GPModel model_from_json(const nlohmann::json& doc);

// 17-significant-digit decimal rendering used by the model serialization.
std::string format_double(double v);
// Shortest decimal that round-trips exactly; used by the CSV writers.
std::string format_double_shortest(double v);
double parse_double(const std::string& s);

}  // namespace gpsmooth::gp
