#pragma once

#include <string>

#include <json.hpp>

#include "bspeig/harness/experiment.hpp"

namespace bspeig::harness {

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const CostReport& r);
CostReport report_from_json(const nlohmann::json& j);

// One row per stage followed by a totals row.
std::string report_to_csv(const CostReport& r);

nlohmann::json sweep_to_json(const SweepResult& s);
std::string sweep_to_csv(const SweepResult& s);

}  // namespace bspeig::harness
