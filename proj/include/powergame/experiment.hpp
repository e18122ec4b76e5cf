#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powergame/channel.hpp"
#include "powergame/game.hpp"
#include "powergame/packet_sim.hpp"
#include "powergame/quantizer.hpp"
#include "powergame/topology.hpp"

namespace powergame {

enum class Mode { continuous, discretized_posthoc, discretized_game, full_power };

inline constexpr Mode kAllModes[] = {Mode::continuous, Mode::discretized_posthoc,
                                     Mode::discretized_game, Mode::full_power};

std::string_view to_string(Mode mode);
/// Throws std::invalid_argument for an unknown name.
Mode mode_from_string(std::string_view name);

enum class InitialProfile { max, min, fixed };

struct ScenarioConfig {
  // Either a generated layout (nodes/area/seed) or one loaded from a file.
  std::size_t node_count{80};
  Area area{100.0, 100.0};
  std::uint64_t topology_seed{1};
  std::optional<Topology> topology;
  std::optional<std::string> topology_file;

  PathLossModel path_loss;
  NoiseFloor noise{1e-10};
  // Airtime share of one 25-byte frame every 2 s at 250 kb/s.
  double interference_activity{4e-4};

  GameParams game;
  double s_min{0.5};
  double s_max{25.0};
  InitialProfile initial{InitialProfile::max};
  double initial_value{25.0};

  LevelSet levels{LevelSet::uniform(25)};
  RegisterMap registers{RegisterMap::linear(LevelSet::uniform(25))};

  TrafficConfig traffic;
  std::vector<Mode> modes{std::begin(kAllModes), std::end(kAllModes)};
  std::string output_dir{"out"};

  /// Throws std::invalid_argument describing the first violation found.
  void validate() const;
  /// Sets the topology, shadowing and traffic seeds.
  void override_seed(std::uint64_t seed);
  /// Simulation-style (30 retries) or testbed-style (3 retries, 2 s period).
  static ScenarioConfig simulation_preset();
  static ScenarioConfig testbed_preset();
};

struct NodePower {
  NodeId id{0};
  double s{0.0};
  double dbm{0.0};
  double mw{0.0};
  bool feasible{false};
  int register_id{0};

  bool operator==(const NodePower&) const = default;
};

struct ConvergenceInfo {
  int sweeps{0};
  bool converged{false};
  std::vector<double> potential_trace;
  std::vector<std::vector<double>> strategy_trace;
  int non_unimodal_scans{0};
  int cycle_length{0};

  bool operator==(const ConvergenceInfo&) const = default;
};

struct LinkRecord {
  NodeId i{0};
  NodeId j{0};
  double analytic_prr{0.0};
  double empirical_prr{0.0};
  int first_attempts{0};
  std::string link_class;

  bool operator==(const LinkRecord&) const = default;
};

struct ModeReport {
  Mode mode{Mode::continuous};
  std::vector<NodePower> nodes;
  std::optional<ConvergenceInfo> equilibrium;  // absent for full power
  double analytic_avg_prr{0.0};
  double avg_prr{0.0};  // empirical, first attempts
  double delivery_ratio{0.0};
  double relative_energy{0.0};
  LinkClassFractions link_classes;
  std::vector<CdfPoint> cdf;
  std::vector<LinkRecord> links;
  std::vector<NodeId> orphan_senders;
  bool connected_bfs{false};
  bool connected_spectral{false};
  double algebraic_connectivity{0.0};

  bool operator==(const ModeReport&) const = default;
};

struct ModeDelta {
  Mode mode{Mode::continuous};
  Mode baseline{Mode::full_power};
  double delta_avg_prr_pp{0.0};           // empirical, percentage points
  double delta_analytic_prr_pp{0.0};
  double delta_relative_energy{0.0};

  bool operator==(const ModeDelta&) const = default;
};

struct SimulationReport {
  Topology topology;
  bool full_power_connected{false};
  std::vector<ModeReport> modes;
  std::vector<ModeDelta> deltas;  // every other mode against full power, when run

  const ModeReport* find(Mode mode) const;
  bool operator==(const SimulationReport&) const = default;
};

/// The layout a config describes: the loaded/inline topology or a fresh
/// random one.
Topology resolve_topology(const ScenarioConfig& config);

RadioChannel make_channel(const Topology& topology, const ScenarioConfig& config);

SimulationReport run_scenario(const ScenarioConfig& config);

/// a minus b. Both sections must come from the same layout.
ModeDelta compare(const ModeReport& a, const ModeReport& b);
ModeDelta compare(const SimulationReport& report_a, Mode mode_a, const SimulationReport& report_b,
                  Mode mode_b);

/// Writes report.json, powers.csv, summary.csv and per-mode links.csv,
/// trace.csv and cdf.csv under dir/<mode>/. Throws std::runtime_error when
/// the directory cannot be written.
void emit(const SimulationReport& report, const std::filesystem::path& dir);

}  // namespace powergame
