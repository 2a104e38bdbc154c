#pragma once

#include "riskcal/model.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace riskcal {

/// JSON form of a fitted model, tagged by "family". Matrices are nested rows.
/// Doubles are written exactly, so a round trip reproduces the parameters.
nlohmann::json model_to_json(const GenerativeModel& model, const std::vector<std::string>& class_names = {});

/// Inverse of model_to_json. Throws std::invalid_argument on malformed input.
GenerativeModel model_from_json(const nlohmann::json& doc);

}  // namespace riskcal
