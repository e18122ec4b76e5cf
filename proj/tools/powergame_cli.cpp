#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powergame/experiment.hpp"
#include "powergame/report_io.hpp"

namespace {

using namespace powergame;

constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed_override;
};

ScenarioConfig load_scenario(const CommonOptions& opts) {
  ScenarioConfig config;
  if (!opts.config_path.empty()) {
    config = load_config(opts.config_path);
  } else if (opts.preset == "testbed") {
    config = ScenarioConfig::testbed_preset();
  } else {
    config = ScenarioConfig::simulation_preset();
  }
  if (opts.seed_override) config.override_seed(*opts.seed_override);
  return config;
}

std::vector<Mode> parse_modes(const std::vector<std::string>& names) {
  std::vector<Mode> modes;
  for (const auto& n : names) modes.push_back(mode_from_string(n));
  return modes;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Scenario config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", opts.preset, "Defaults when no config is given")
      ->check(CLI::IsMember({"simulation", "testbed"}));
  cmd->add_option("--seed-override", opts.seed_override,
                  "Replace the topology, shadowing and traffic seeds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission power control game toolkit"};
  app.require_subcommand(1);

  // generate-topology
  CommonOptions gen_opts;
  std::string gen_out;
  std::optional<std::size_t> gen_nodes;
  auto* gen = app.add_subcommand("generate-topology", "Write a random node layout as JSON");
  add_common(gen, gen_opts);
  gen->add_option("--nodes", gen_nodes, "Node count")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  // validate
  CommonOptions val_opts;
  auto* val = app.add_subcommand("validate", "Check a scenario config and print it normalized");
  add_common(val, val_opts);
  val->get_option("--config")->required();

  // run
  CommonOptions run_opts;
  std::string run_out;
  std::vector<std::string> run_modes;
  auto* run = app.add_subcommand("run", "Run a scenario and write JSON and CSV reports");
  add_common(run, run_opts);
  run->add_option("--out", run_out, "Output directory (overrides the config)");
  run->add_option("--modes", run_modes, "Subset of modes to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"continuous", "discretized-posthoc", "discretized-game", "full-power"}));

  // compare
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_mode_a = "continuous";
  std::string cmp_mode_b = "full-power";
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "Difference between two report sections (a minus b)");
  cmp->add_option("report_a", cmp_a, "First report.json")->required()->check(CLI::ExistingFile);
  cmp->add_option("report_b", cmp_b, "Second report.json (defaults to the first)")
      ->check(CLI::ExistingFile);
  cmp->add_option("--mode-a", cmp_mode_a, "Mode section of the first report");
  cmp->add_option("--mode-b", cmp_mode_b, "Mode section of the second report");
  cmp->add_option("--out", cmp_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*gen) {
      ScenarioConfig config = load_scenario(gen_opts);
      if (gen_nodes) config.node_count = *gen_nodes;
      config.topology.reset();
      config.validate();
      const Topology t = resolve_topology(config);
      if (gen_out.empty()) {
        std::cout << topology_to_json(t).dump(2) << '\n';
      } else {
        save_topology(t, gen_out);
      }
    } else if (*val) {
      const ScenarioConfig config = load_scenario(val_opts);
      std::cout << config_to_json(config).dump(2) << '\n';
    } else if (*run) {
      ScenarioConfig config = load_scenario(run_opts);
      if (!run_modes.empty()) config.modes = parse_modes(run_modes);
      if (!run_out.empty()) config.output_dir = run_out;
      config.validate();
      const SimulationReport report = run_scenario(config);
      emit(report, config.output_dir);
      if (!report.full_power_connected) {
        std::cerr << "warning: the full-power topology is disconnected; "
                     "degree constraints cannot all be met\n";
      }
      for (const auto& m : report.modes) {
        std::cout << fmt::format("{:<20} avg_prr={:.4f} relative_energy={:.4f} connected={}\n",
                                 to_string(m.mode), m.avg_prr, m.relative_energy,
                                 m.connected_bfs);
      }
    } else if (*cmp) {
      const SimulationReport a = load_report(cmp_a);
      const SimulationReport b = cmp_b.empty() ? a : load_report(cmp_b);
      const ModeDelta d =
          compare(a, mode_from_string(cmp_mode_a), b, mode_from_string(cmp_mode_b));
      const std::string text = delta_to_json(d).dump(2);
      if (cmp_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream out(cmp_out);
        if (!(out << text << '\n')) {
          throw std::runtime_error(fmt::format("cannot write '{}'", cmp_out));
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  return 0;
}
