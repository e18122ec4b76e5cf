#include "powergame/experiment.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <future>
#include <stdexcept>

#include "powergame/report_io.hpp"

namespace powergame {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::continuous: return "continuous";
    case Mode::discretized_posthoc: return "discretized-posthoc";
    case Mode::discretized_game: return "discretized-game";
    case Mode::full_power: return "full-power";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view name) {
  for (Mode m : kAllModes) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument(fmt::format("unknown mode '{}'", name));
}

void ScenarioConfig::validate() const {
  if (topology) {
    topology->validate();
  } else {
    if (node_count < 2) throw std::invalid_argument("config: need at least 2 nodes");
    if (!(area.width > 0.0 && area.height > 0.0)) {
      throw std::invalid_argument("config: area must be positive");
    }
  }
  path_loss.validate();
  noise.validate();
  if (!(interference_activity >= 0.0 && interference_activity <= 1.0)) {
    throw std::invalid_argument("config: interference_activity must lie in [0, 1]");
  }
  game.validate();
  if (!(s_min > 0.0 && s_min < s_max && s_max <= kStrategyUpper)) {
    throw std::invalid_argument("config: strategy bounds must satisfy 0 < s_min < s_max <= 25");
  }
  if (initial == InitialProfile::fixed && !(initial_value >= s_min && initial_value <= s_max)) {
    throw std::invalid_argument("config: initial strategy outside [s_min, s_max]");
  }
  // Throws when no level fits the strategy box.
  (void)levels.restricted(strategy_to_dbm(s_min), strategy_to_dbm(s_max));
  traffic.validate();
  if (modes.empty()) throw std::invalid_argument("config: at least one mode must be selected");
  for (std::size_t a = 0; a < modes.size(); ++a) {
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      if (modes[a] == modes[b]) throw std::invalid_argument("config: duplicate mode");
    }
  }
  if (output_dir.empty()) throw std::invalid_argument("config: output_dir is empty");
}

void ScenarioConfig::override_seed(std::uint64_t seed) {
  topology_seed = seed;
  if (topology) topology->seed = seed;
  path_loss.seed = seed;
  traffic.seed = seed;
}

ScenarioConfig ScenarioConfig::simulation_preset() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::testbed_preset() {
  ScenarioConfig c;
  c.traffic = TrafficConfig::testbed_preset();
  return c;
}

const ModeReport* SimulationReport::find(Mode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

Topology resolve_topology(const ScenarioConfig& config) {
  if (config.topology) return *config.topology;
  return random_topology(config.node_count, config.area, config.topology_seed);
}

RadioChannel make_channel(const Topology& topology, const ScenarioConfig& config) {
  RadioChannel channel{build_gain_matrix(topology.positions, config.path_loss), config.noise,
                       config.interference_activity};
  channel.validate();
  return channel;
}

namespace {

StrategyProfile initial_profile(const ScenarioConfig& config, std::size_t n) {
  switch (config.initial) {
    case InitialProfile::min: return StrategyProfile::uniform(n, config.s_min, config.s_min, config.s_max);
    case InitialProfile::fixed:
      return StrategyProfile::uniform(n, config.initial_value, config.s_min, config.s_max);
    case InitialProfile::max: break;
  }
  return StrategyProfile::uniform(n, config.s_max, config.s_min, config.s_max);
}

ConvergenceInfo convergence_info(const EquilibriumResult& eq) {
  return {eq.sweeps_used, eq.converged, eq.potential_trace, eq.strategy_trace,
          eq.non_unimodal_scans, eq.cycle_length};
}

ModeReport build_mode_report(Mode mode, const StrategyProfile& profile,
                             std::optional<ConvergenceInfo> equilibrium,
                             const RadioChannel& channel, const ScenarioConfig& config) {
  const std::size_t n = profile.size();
  ModeReport r;
  r.mode = mode;
  r.equilibrium = std::move(equilibrium);

  const auto feasible = degree_feasibility(profile, channel, config.game);
  const double reg_lo = config.registers.entries().front().dbm;
  const double reg_hi = config.registers.entries().back().dbm;
  for (NodeId i = 0; i < n; ++i) {
    r.nodes.push_back({i, profile[i], profile.dbm(i), profile.mw(i), feasible[i],
                       to_register(std::clamp(profile.dbm(i), reg_lo, reg_hi), config.registers)});
  }

  const int bytes = config.traffic.payload_bytes;
  const auto plan = assign_receivers(profile, channel, bytes, config.game.epsilon_link,
                                     config.traffic.receiver_policy);
  const auto log = simulate(profile, channel, config.traffic, plan);
  const auto summary = empirical_prr(log);
  r.avg_prr = summary.avg_prr;
  r.delivery_ratio = summary.delivery_ratio;
  r.relative_energy = relative_energy(log);
  r.orphan_senders = log.orphan_senders;

  const auto powers = profile.powers_mw();
  double analytic_sum = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    OutgoingLinks links(channel, powers, i, bytes);
    if (plan[i].empty()) {
      // Sender without a neighbor: score its best link, below threshold.
      double best = 0.0;
      for (NodeId j = 0; j < n; ++j) {
        if (j != i) best = std::max(best, links.prr(j, powers[i]));
      }
      analytic_sum += best;
      continue;
    }
    double s = 0.0;
    for (NodeId j : plan[i]) s += links.prr(j, powers[i]);
    analytic_sum += s / static_cast<double>(plan[i].size());
  }
  r.analytic_avg_prr = analytic_sum / static_cast<double>(n);

  std::vector<double> empirical;
  for (const auto& l : summary.links) {
    const double analytic = link_prr(l.sender, l.receiver, powers, channel, bytes);
    r.links.push_back({l.sender, l.receiver, analytic, l.empirical_prr, l.first_attempts,
                       to_string(classify_link(l.empirical_prr))});
    empirical.push_back(l.empirical_prr);
  }
  if (!empirical.empty()) {
    const auto cdf = link_cdf(empirical);
    r.cdf = cdf.points;
    r.link_classes = cdf.fractions;
  }

  const auto adj = adjacency(profile, channel, config.game.packet_bytes, config.game.epsilon_link);
  r.connected_bfs = is_connected_bfs(adj);
  const auto spectral = spectral_connectivity(adj);
  r.connected_spectral = spectral.connected;
  r.algebraic_connectivity = spectral.algebraic_connectivity;
  return r;
}

}  // namespace

SimulationReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  const Topology topo = resolve_topology(config);
  topo.validate();
  const RadioChannel channel = make_channel(topo, config);
  const std::size_t n = topo.size();

  SimulationReport report;
  report.topology = topo;
  const auto full = StrategyProfile::uniform(n, config.s_max, config.s_min, config.s_max);
  report.full_power_connected = is_connected_bfs(
      adjacency(full, channel, config.game.packet_bytes, config.game.epsilon_link));

  const StrategyProfile start = initial_profile(config, n);
  const bool needs_continuous =
      std::any_of(config.modes.begin(), config.modes.end(), [](Mode m) {
        return m == Mode::continuous || m == Mode::discretized_posthoc;
      });

  // Modes share the immutable channel; each task is internally sequential.
  std::shared_future<EquilibriumResult> continuous;
  if (needs_continuous) {
    continuous = std::async(std::launch::async, [&] {
                   return solve(start, channel, config.game);
                 }).share();
  }

  std::vector<std::future<ModeReport>> tasks;
  for (Mode mode : config.modes) {
    tasks.push_back(std::async(std::launch::async, [&, mode] {
      switch (mode) {
        case Mode::continuous: {
          const auto& eq = continuous.get();
          return build_mode_report(mode, eq.profile, convergence_info(eq), channel, config);
        }
        case Mode::discretized_posthoc: {
          const auto& eq = continuous.get();
          return build_mode_report(mode, discretize_profile(eq.profile, config.levels),
                                   convergence_info(eq), channel, config);
        }
        case Mode::discretized_game: {
          const auto eq = solve_discrete(start, channel, config.game, config.levels);
          return build_mode_report(mode, eq.profile, convergence_info(eq), channel, config);
        }
        case Mode::full_power: break;
      }
      return build_mode_report(mode, full, std::nullopt, channel, config);
    }));
  }
  for (auto& t : tasks) report.modes.push_back(t.get());

  if (const ModeReport* baseline = report.find(Mode::full_power)) {
    for (const auto& m : report.modes) {
      if (m.mode != Mode::full_power) report.deltas.push_back(compare(m, *baseline));
    }
  }
  return report;
}

ModeDelta compare(const ModeReport& a, const ModeReport& b) {
  if (a.nodes.size() != b.nodes.size()) {
    throw std::invalid_argument("compare: mode sections cover different node counts");
  }
  return {a.mode,
          b.mode,
          100.0 * (a.avg_prr - b.avg_prr),
          100.0 * (a.analytic_avg_prr - b.analytic_avg_prr),
          a.relative_energy - b.relative_energy};
}

ModeDelta compare(const SimulationReport& report_a, Mode mode_a, const SimulationReport& report_b,
                  Mode mode_b) {
  if (!(report_a.topology.positions == report_b.topology.positions) ||
      !(report_a.topology.area == report_b.topology.area)) {
    throw std::invalid_argument("compare: reports come from different topologies");
  }
  const ModeReport* a = report_a.find(mode_a);
  const ModeReport* b = report_b.find(mode_b);
  if (a == nullptr || b == nullptr) {
    throw std::invalid_argument("compare: requested mode missing from report");
  }
  return compare(*a, *b);
}

namespace {

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

}  // namespace

void emit(const SimulationReport& report, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  const auto open = [](const fs::path& p) {
    try {
      return fmt::output_file(p.string());
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("cannot write '{}': {}", p.string(), e.what()));
    }
  };

  {
    auto out = open(dir / "report.json");
    out.print("{}\n", report_to_json(report).dump(2));
  }
  {
    auto out = open(dir / "powers.csv");
    out.print("node,mode,s,dbm,mw,register_id\n");
    for (const auto& m : report.modes) {
      for (const auto& p : m.nodes) {
        out.print("{},{},{},{},{},{}\n", p.id, to_string(m.mode), p.s, p.dbm, p.mw, p.register_id);
      }
    }
  }
  {
    auto out = open(dir / "summary.csv");
    out.print("mode,avg_prr,relative_energy,connected\n");
    for (const auto& m : report.modes) {
      out.print("{},{},{},{}\n", to_string(m.mode), m.avg_prr, m.relative_energy,
                fmt_bool(m.connected_bfs));
    }
  }
  for (const auto& m : report.modes) {
    const fs::path sub = dir / std::string(to_string(m.mode));
    fs::create_directories(sub, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", sub.string(), ec.message()));
    {
      auto out = open(sub / "links.csv");
      out.print("i,j,analytic_prr,empirical_prr,class\n");
      for (const auto& l : m.links) {
        out.print("{},{},{},{},{}\n", l.i, l.j, l.analytic_prr, l.empirical_prr, l.link_class);
      }
    }
    {
      auto out = open(sub / "trace.csv");
      out.print("sweep,node,s\n");
      if (m.equilibrium) {
        const auto& trace = m.equilibrium->strategy_trace;
        for (std::size_t t = 0; t < trace.size(); ++t) {
          for (std::size_t i = 0; i < trace[t].size(); ++i) out.print("{},{},{}\n", t, i, trace[t][i]);
        }
      } else {
        for (const auto& p : m.nodes) out.print("0,{},{}\n", p.id, p.s);
      }
    }
    {
      auto out = open(sub / "cdf.csv");
      out.print("prr,cumulative_fraction\n");
      for (const auto& c : m.cdf) out.print("{},{}\n", c.prr, c.cumulative_fraction);
    }
  }
}

}  // namespace powergame
