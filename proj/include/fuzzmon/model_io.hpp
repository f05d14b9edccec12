#pragma once

#include <string>

#include <json.hpp>

#include "fuzzmon/fuzzy_monitor.hpp"

namespace fuzzmon {

inline constexpr const char* kModelFormat = "fuzzmon-model";
inline constexpr int kModelVersion = 1;

// Versioned JSON carrying every state field. Doubles are written in their
// shortest round-trip form, so load(save(m)) restores m bit for bit.
nlohmann::json model_to_json(const FuzzyMonitor& model);
FuzzyMonitor model_from_json(const nlohmann::json& doc);

std::string save_state(const FuzzyMonitor& model);
// Throws StateVersionError / StateFormatError.
FuzzyMonitor load_state(const std::string& document);

void save_model_file(const FuzzyMonitor& model, const std::string& path);
FuzzyMonitor load_model_file(const std::string& path);

nlohmann::json hyperparameters_to_json(const Hyperparameters& hyper);
Hyperparameters hyperparameters_from_json(const nlohmann::json& doc);

}  // namespace fuzzmon
