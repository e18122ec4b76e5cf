#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include <json.hpp>

#include "powergame/experiment.hpp"

namespace powergame {

// Topology files: {"area": {"width", "height"}, "seed", "nodes": [{"id", "x", "y"}, ...]}
nlohmann::json topology_to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& j);
void save_topology(const Topology& topology, const std::filesystem::path& path);
Topology load_topology(const std::filesystem::path& path);

// Level sets and register maps: {"levels_dbm": [...], "registers": [{"dbm", "id"}, ...]}
nlohmann::json levels_to_json(const LevelSet& levels, const RegisterMap& registers);
std::pair<LevelSet, std::optional<RegisterMap>> levels_from_json(const nlohmann::json& j);

nlohmann::json equilibrium_to_json(const EquilibriumResult& result);

/// Parses and validates a scenario. Relative topology file paths resolve
/// against base_dir. Throws std::invalid_argument on any schema violation.
ScenarioConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& config);

nlohmann::json report_to_json(const SimulationReport& report);
SimulationReport report_from_json(const nlohmann::json& j);
SimulationReport load_report(const std::filesystem::path& path);

nlohmann::json delta_to_json(const ModeDelta& delta);

}  // namespace powergame
