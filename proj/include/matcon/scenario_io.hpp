#ifndef MATCON_SCENARIO_IO_HPP
#define MATCON_SCENARIO_IO_HPP

#include "matcon/scenario.hpp"

#include "json.hpp"

#include <string>

namespace matcon {

/// Parses and validates a scenario. Errors are ConfigError with a JSON
/// field path such as "AB.A.values[1]".
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& s);

ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& s, const std::string& path);

nlohmann::json matrix_to_json(const MatrixXd& a);
MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field);

} // namespace matcon

#endif
