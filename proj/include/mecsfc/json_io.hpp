#pragma once

#include <string>

#include <json.hpp>

#include "mecsfc/assignment.hpp"
#include "mecsfc/jcora.hpp"
#include "mecsfc/scenario.hpp"

namespace mecsfc {

using Json = nlohmann::ordered_json;

// Config files are partial: keys present override the defaults.
ScenarioConfig config_from_json(const Json& j);
Json config_to_json(const ScenarioConfig& config);

// Canonical scenario snapshot; serialize/deserialize round-trips exactly.
Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);

Json assignment_to_json(const Assignment& assignment);
Assignment assignment_from_json(const Json& j);

Json report_to_json(const SolutionReport& report);
Json trace_to_json(const SolverTrace& trace);
Json feasibility_to_json(const FeasibilityReport& report);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace mecsfc
