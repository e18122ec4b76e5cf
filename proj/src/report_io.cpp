#include "powergame/report_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace powergame {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

// One JSON object of the config schema: rejects unknown keys and wraps type
// errors into std::invalid_argument naming the offending field.
class Section {
 public:
  Section(const json& j, std::string name, std::initializer_list<const char*> allowed)
      : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw std::invalid_argument(fmt::format("config: '{}' must be an object", name_));
    for (const auto& [key, value] : j_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        throw std::invalid_argument(fmt::format("config: unknown key '{}.{}'", name_, key));
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument(fmt::format("config: '{}.{}' has the wrong type", name_, key));
    }
  }

 private:
  const json& j_;
  std::string name_;
};

DegreeRule degree_rule_from(const std::string& s) {
  if (s == "fixed") return DegreeRule::fixed_k;
  if (s == "smallworld") return DegreeRule::smallworld;
  throw std::invalid_argument(fmt::format("config: unknown degree_rule '{}'", s));
}
const char* to_string(DegreeRule r) { return r == DegreeRule::fixed_k ? "fixed" : "smallworld"; }

NcrDenominator ncr_denominator_from(const std::string& s) {
  if (s == "neighbors") return NcrDenominator::neighbors;
  if (s == "union") return NcrDenominator::neighbor_union;
  throw std::invalid_argument(fmt::format("config: unknown ncr_denominator '{}'", s));
}
const char* to_string(NcrDenominator d) { return d == NcrDenominator::neighbors ? "neighbors" : "union"; }

UpdateOrder update_order_from(const std::string& s) {
  if (s == "ascending") return UpdateOrder::ascending;
  if (s == "descending") return UpdateOrder::descending;
  throw std::invalid_argument(fmt::format("config: unknown update_order '{}'", s));
}
const char* to_string(UpdateOrder o) { return o == UpdateOrder::ascending ? "ascending" : "descending"; }

ReceiverPolicy receiver_policy_from(const std::string& s) {
  if (s == "best") return ReceiverPolicy::best_link;
  if (s == "round_robin") return ReceiverPolicy::round_robin;
  throw std::invalid_argument(fmt::format("config: unknown receiver_policy '{}'", s));
}
const char* to_string(ReceiverPolicy p) { return p == ReceiverPolicy::best_link ? "best" : "round_robin"; }

RegisterMap registers_from_json(const json& j, const LevelSet& levels) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "linear") return RegisterMap::linear(levels);
    if (name == "cc2420") return RegisterMap::cc2420();
    throw std::invalid_argument(fmt::format("config: unknown register preset '{}'", name));
  }
  if (!j.is_array()) throw std::invalid_argument("config: registers must be a preset name or an array");
  std::vector<RegisterMap::Entry> entries;
  for (const auto& e : j) {
    Section s(e, "registers[]", {"dbm", "id"});
    if (!s.has("dbm") || !s.has("id")) throw std::invalid_argument("config: register entry needs dbm and id");
    entries.push_back({s.get<double>("dbm", 0.0), s.get<int>("id", 0)});
  }
  return RegisterMap(std::move(entries));
}

json registers_to_json(const RegisterMap& map) {
  json out = json::array();
  for (const auto& e : map.entries()) out.push_back({{"dbm", e.dbm}, {"id", e.id}});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

json topology_to_json(const Topology& topology) {
  json nodes = json::array();
  for (std::size_t i = 0; i < topology.positions.size(); ++i) {
    nodes.push_back({{"id", i}, {"x", topology.positions[i].x}, {"y", topology.positions[i].y}});
  }
  return {{"area", {{"width", topology.area.width}, {"height", topology.area.height}}},
          {"seed", topology.seed},
          {"nodes", nodes}};
}

Topology topology_from_json(const json& j) {
  Section top(j, "topology", {"area", "seed", "nodes"});
  if (!top.has("area") || !top.has("nodes")) {
    throw std::invalid_argument("topology: 'area' and 'nodes' are required");
  }
  Section area(top.at("area"), "topology.area", {"width", "height"});
  Topology t;
  t.area = {area.get<double>("width", 0.0), area.get<double>("height", 0.0)};
  t.seed = top.get<std::uint64_t>("seed", 0);
  const json& nodes = top.at("nodes");
  if (!nodes.is_array()) throw std::invalid_argument("topology: 'nodes' must be an array");
  t.positions.resize(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  for (const auto& n : nodes) {
    Section node(n, "topology.nodes[]", {"id", "x", "y"});
    const auto id = node.get<std::size_t>("id", nodes.size());
    if (id >= nodes.size() || seen[id]) {
      throw std::invalid_argument("topology: node ids must be 0..M-1 without repeats");
    }
    seen[id] = true;
    t.positions[id] = {node.get<double>("x", 0.0), node.get<double>("y", 0.0)};
  }
  t.validate();
  return t;
}

void save_topology(const Topology& topology, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << topology_to_json(topology).dump(2) << '\n';
}

Topology load_topology(const std::filesystem::path& path) {
  return topology_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Levels
// ---------------------------------------------------------------------------

json levels_to_json(const LevelSet& levels, const RegisterMap& registers) {
  return {{"levels_dbm", levels.levels()}, {"registers", registers_to_json(registers)}};
}

std::pair<LevelSet, std::optional<RegisterMap>> levels_from_json(const json& j) {
  Section s(j, "quantizer", {"levels", "levels_dbm", "registers"});
  if (s.has("levels") && s.has("levels_dbm")) {
    throw std::invalid_argument("config: give either 'levels' or 'levels_dbm', not both");
  }
  LevelSet levels = s.has("levels_dbm")
                        ? LevelSet(s.get<std::vector<double>>("levels_dbm", {}))
                        : LevelSet::uniform(s.get<int>("levels", 25));
  std::optional<RegisterMap> registers;
  if (s.has("registers")) registers = registers_from_json(s.at("registers"), levels);
  return {std::move(levels), std::move(registers)};
}

json equilibrium_to_json(const EquilibriumResult& result) {
  json nodes = json::array();
  for (NodeId i = 0; i < result.profile.size(); ++i) {
    nodes.push_back({{"id", i},
                     {"s", result.profile[i]},
                     {"dbm", result.profile.dbm(i)},
                     {"mw", result.profile.mw(i)},
                     {"feasible", i < result.feasible.size() && result.feasible[i]}});
  }
  return {{"nodes", nodes},
          {"potential_trace", result.potential_trace},
          {"sweeps", result.sweeps_used},
          {"converged", result.converged},
          {"non_unimodal_scans", result.non_unimodal_scans},
          {"cycle_length", result.cycle_length}};
}

// ---------------------------------------------------------------------------
// Scenario config
// ---------------------------------------------------------------------------

ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  Section root(j, "config",
               {"preset", "topology", "channel", "game", "quantizer", "traffic", "modes", "output_dir"});

  ScenarioConfig c;
  const auto preset = root.get<std::string>("preset", "simulation");
  if (preset == "simulation") {
    c = ScenarioConfig::simulation_preset();
  } else if (preset == "testbed") {
    c = ScenarioConfig::testbed_preset();
  } else {
    throw std::invalid_argument(fmt::format("config: unknown preset '{}'", preset));
  }

  if (root.has("topology")) {
    Section t(root.at("topology"), "topology", {"node_count", "width", "height", "seed", "file"});
    c.node_count = t.get<std::size_t>("node_count", c.node_count);
    c.area = {t.get<double>("width", c.area.width), t.get<double>("height", c.area.height)};
    c.topology_seed = t.get<std::uint64_t>("seed", c.topology_seed);
    if (t.has("file")) {
      std::filesystem::path file = t.get<std::string>("file", "");
      if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
      c.topology_file = file.string();
      c.topology = load_topology(file);
      c.node_count = c.topology->size();
      c.area = c.topology->area;
      c.topology_seed = c.topology->seed;
    }
  }

  if (root.has("channel")) {
    Section ch(root.at("channel"), "channel",
               {"reference_distance_m", "reference_gain_db", "exponent", "shadowing_sigma_db",
                "shadowing_seed", "noise_floor_mw", "interference_activity"});
    auto& pl = c.path_loss;
    pl.reference_distance_m = ch.get("reference_distance_m", pl.reference_distance_m);
    pl.reference_gain_db = ch.get("reference_gain_db", pl.reference_gain_db);
    pl.exponent = ch.get("exponent", pl.exponent);
    pl.shadowing_sigma_db = ch.get("shadowing_sigma_db", pl.shadowing_sigma_db);
    pl.seed = ch.get<std::uint64_t>("shadowing_seed", pl.seed);
    c.noise.mw = ch.get("noise_floor_mw", c.noise.mw);
    c.interference_activity = ch.get("interference_activity", c.interference_activity);
  }

  bool payload_given = false;
  if (root.has("traffic")) {
    Section t(root.at("traffic"), "traffic",
              {"message_period_s", "messages_per_node", "payload_bytes", "max_retries", "seed",
               "receiver_policy"});
    auto& tr = c.traffic;
    tr.message_period_s = t.get("message_period_s", tr.message_period_s);
    tr.messages_per_node = t.get("messages_per_node", tr.messages_per_node);
    payload_given = t.has("payload_bytes");
    tr.payload_bytes = t.get("payload_bytes", tr.payload_bytes);
    tr.max_retries = t.get("max_retries", tr.max_retries);
    tr.seed = t.get<std::uint64_t>("seed", tr.seed);
    if (t.has("receiver_policy")) {
      tr.receiver_policy = receiver_policy_from(t.get<std::string>("receiver_policy", ""));
    }
  }

  if (root.has("game")) {
    Section g(root.at("game"), "game",
              {"ncr_scale", "cost_denominator", "log_base", "packet_bytes", "epsilon_link",
               "degree_target", "degree_rule", "smallworld_delta", "ncr_denominator", "max_sweeps",
               "convergence_tol", "br_tol", "prescan_samples", "update_order", "s_min", "s_max",
               "initial"});
    auto& gp = c.game;
    gp.ncr_scale = g.get("ncr_scale", gp.ncr_scale);
    gp.cost_denominator = g.get("cost_denominator", gp.cost_denominator);
    gp.log_base = g.get("log_base", gp.log_base);
    gp.packet_bytes = g.get("packet_bytes", gp.packet_bytes);
    gp.epsilon_link = g.get("epsilon_link", gp.epsilon_link);
    gp.degree_target = g.get("degree_target", gp.degree_target);
    if (g.has("degree_rule")) gp.degree_rule = degree_rule_from(g.get<std::string>("degree_rule", ""));
    gp.smallworld_delta = g.get("smallworld_delta", gp.smallworld_delta);
    if (g.has("ncr_denominator")) {
      gp.ncr_denominator = ncr_denominator_from(g.get<std::string>("ncr_denominator", ""));
    }
    gp.max_sweeps = g.get("max_sweeps", gp.max_sweeps);
    gp.convergence_tol = g.get("convergence_tol", gp.convergence_tol);
    gp.br_tol = g.get("br_tol", gp.br_tol);
    gp.prescan_samples = g.get("prescan_samples", gp.prescan_samples);
    if (g.has("update_order")) gp.update_order = update_order_from(g.get<std::string>("update_order", ""));
    c.s_min = g.get("s_min", c.s_min);
    c.s_max = g.get("s_max", c.s_max);
    c.initial_value = c.s_max;
    if (g.has("initial")) {
      const json& init = g.at("initial");
      if (init.is_number()) {
        c.initial = InitialProfile::fixed;
        c.initial_value = init.get<double>();
      } else if (init == "max") {
        c.initial = InitialProfile::max;
      } else if (init == "min") {
        c.initial = InitialProfile::min;
      } else {
        throw std::invalid_argument("config: game.initial must be \"max\", \"min\" or a number");
      }
    }
  }
  if (!payload_given) c.traffic.payload_bytes = c.game.packet_bytes;

  if (root.has("quantizer")) {
    auto [levels, registers] = levels_from_json(root.at("quantizer"));
    c.levels = std::move(levels);
    c.registers = registers ? std::move(*registers) : RegisterMap::linear(c.levels);
  }

  if (root.has("modes")) {
    const json& modes = root.at("modes");
    if (!modes.is_array()) throw std::invalid_argument("config: 'modes' must be an array");
    c.modes.clear();
    for (const auto& m : modes) {
      if (!m.is_string()) throw std::invalid_argument("config: mode names must be strings");
      c.modes.push_back(mode_from_string(m.get<std::string>()));
    }
  }
  c.output_dir = root.get<std::string>("output_dir", c.output_dir);

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

json config_to_json(const ScenarioConfig& c) {
  json topology = {{"node_count", c.node_count},
                   {"width", c.area.width},
                   {"height", c.area.height},
                   {"seed", c.topology_seed}};
  if (c.topology_file) topology["file"] = *c.topology_file;
  json initial;
  switch (c.initial) {
    case InitialProfile::max: initial = "max"; break;
    case InitialProfile::min: initial = "min"; break;
    case InitialProfile::fixed: initial = c.initial_value; break;
  }
  json modes = json::array();
  for (Mode m : c.modes) modes.push_back(std::string(to_string(m)));
  const auto& gp = c.game;
  return {{"topology", topology},
          {"channel",
           {{"reference_distance_m", c.path_loss.reference_distance_m},
            {"reference_gain_db", c.path_loss.reference_gain_db},
            {"exponent", c.path_loss.exponent},
            {"shadowing_sigma_db", c.path_loss.shadowing_sigma_db},
            {"shadowing_seed", c.path_loss.seed},
            {"noise_floor_mw", c.noise.mw},
            {"interference_activity", c.interference_activity}}},
          {"game",
           {{"ncr_scale", gp.ncr_scale},
            {"cost_denominator", gp.cost_denominator},
            {"log_base", gp.log_base},
            {"packet_bytes", gp.packet_bytes},
            {"epsilon_link", gp.epsilon_link},
            {"degree_target", gp.degree_target},
            {"degree_rule", to_string(gp.degree_rule)},
            {"smallworld_delta", gp.smallworld_delta},
            {"ncr_denominator", to_string(gp.ncr_denominator)},
            {"max_sweeps", gp.max_sweeps},
            {"convergence_tol", gp.convergence_tol},
            {"br_tol", gp.br_tol},
            {"prescan_samples", gp.prescan_samples},
            {"update_order", to_string(gp.update_order)},
            {"s_min", c.s_min},
            {"s_max", c.s_max},
            {"initial", initial}}},
          {"quantizer", levels_to_json(c.levels, c.registers)},
          {"traffic",
           {{"message_period_s", c.traffic.message_period_s},
            {"messages_per_node", c.traffic.messages_per_node},
            {"payload_bytes", c.traffic.payload_bytes},
            {"max_retries", c.traffic.max_retries},
            {"seed", c.traffic.seed},
            {"receiver_policy", to_string(c.traffic.receiver_policy)}}},
          {"modes", modes},
          {"output_dir", c.output_dir}};
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

json delta_to_json(const ModeDelta& d) {
  return {{"mode", std::string(to_string(d.mode))},
          {"baseline", std::string(to_string(d.baseline))},
          {"delta_avg_prr_pp", d.delta_avg_prr_pp},
          {"delta_analytic_prr_pp", d.delta_analytic_prr_pp},
          {"delta_relative_energy", d.delta_relative_energy}};
}

json report_to_json(const SimulationReport& report) {
  json modes = json::array();
  for (const auto& m : report.modes) {
    json nodes = json::array();
    for (const auto& p : m.nodes) {
      nodes.push_back({{"id", p.id},
                       {"s", p.s},
                       {"dbm", p.dbm},
                       {"mw", p.mw},
                       {"feasible", p.feasible},
                       {"register_id", p.register_id}});
    }
    json eq = nullptr;
    if (m.equilibrium) {
      eq = {{"sweeps", m.equilibrium->sweeps},
            {"converged", m.equilibrium->converged},
            {"potential_trace", m.equilibrium->potential_trace},
            {"strategy_trace", m.equilibrium->strategy_trace},
            {"non_unimodal_scans", m.equilibrium->non_unimodal_scans},
            {"cycle_length", m.equilibrium->cycle_length}};
    }
    json cdf = json::array();
    for (const auto& c : m.cdf) cdf.push_back({c.prr, c.cumulative_fraction});
    json links = json::array();
    for (const auto& l : m.links) {
      links.push_back({{"i", l.i},
                       {"j", l.j},
                       {"analytic_prr", l.analytic_prr},
                       {"empirical_prr", l.empirical_prr},
                       {"first_attempts", l.first_attempts},
                       {"class", l.link_class}});
    }
    modes.push_back({{"mode", std::string(to_string(m.mode))},
                     {"nodes", nodes},
                     {"equilibrium", eq},
                     {"analytic_avg_prr", m.analytic_avg_prr},
                     {"avg_prr", m.avg_prr},
                     {"delivery_ratio", m.delivery_ratio},
                     {"relative_energy", m.relative_energy},
                     {"link_classes",
                      {{"good", m.link_classes.good},
                       {"intermediate", m.link_classes.intermediate},
                       {"bad", m.link_classes.bad}}},
                     {"cdf", cdf},
                     {"links", links},
                     {"orphan_senders", m.orphan_senders},
                     {"connected_bfs", m.connected_bfs},
                     {"connected_spectral", m.connected_spectral},
                     {"algebraic_connectivity", m.algebraic_connectivity}});
  }
  json deltas = json::array();
  for (const auto& d : report.deltas) deltas.push_back(delta_to_json(d));
  return {{"topology", topology_to_json(report.topology)},
          {"full_power_connected", report.full_power_connected},
          {"modes", modes},
          {"deltas", deltas}};
}

SimulationReport report_from_json(const json& j) {
  try {
    SimulationReport r;
    r.topology = topology_from_json(j.at("topology"));
    r.full_power_connected = j.at("full_power_connected").get<bool>();
    for (const auto& mj : j.at("modes")) {
      ModeReport m;
      m.mode = mode_from_string(mj.at("mode").get<std::string>());
      for (const auto& p : mj.at("nodes")) {
        m.nodes.push_back({p.at("id").get<NodeId>(), p.at("s").get<double>(),
                           p.at("dbm").get<double>(), p.at("mw").get<double>(),
                           p.at("feasible").get<bool>(), p.at("register_id").get<int>()});
      }
      const json& eq = mj.at("equilibrium");
      if (!eq.is_null()) {
        m.equilibrium = ConvergenceInfo{
            eq.at("sweeps").get<int>(), eq.at("converged").get<bool>(),
            eq.at("potential_trace").get<std::vector<double>>(),
            eq.at("strategy_trace").get<std::vector<std::vector<double>>>(),
            eq.at("non_unimodal_scans").get<int>(), eq.at("cycle_length").get<int>()};
      }
      m.analytic_avg_prr = mj.at("analytic_avg_prr").get<double>();
      m.avg_prr = mj.at("avg_prr").get<double>();
      m.delivery_ratio = mj.at("delivery_ratio").get<double>();
      m.relative_energy = mj.at("relative_energy").get<double>();
      const json& lc = mj.at("link_classes");
      m.link_classes = {lc.at("good").get<double>(), lc.at("intermediate").get<double>(),
                        lc.at("bad").get<double>()};
      for (const auto& c : mj.at("cdf")) m.cdf.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      for (const auto& l : mj.at("links")) {
        m.links.push_back({l.at("i").get<NodeId>(), l.at("j").get<NodeId>(),
                           l.at("analytic_prr").get<double>(), l.at("empirical_prr").get<double>(),
                           l.at("first_attempts").get<int>(), l.at("class").get<std::string>()});
      }
      m.orphan_senders = mj.at("orphan_senders").get<std::vector<NodeId>>();
      m.connected_bfs = mj.at("connected_bfs").get<bool>();
      m.connected_spectral = mj.at("connected_spectral").get<bool>();
      m.algebraic_connectivity = mj.at("algebraic_connectivity").get<double>();
      r.modes.push_back(std::move(m));
    }
    for (const auto& d : j.at("deltas")) {
      r.deltas.push_back({mode_from_string(d.at("mode").get<std::string>()),
                          mode_from_string(d.at("baseline").get<std::string>()),
                          d.at("delta_avg_prr_pp").get<double>(),
                          d.at("delta_analytic_prr_pp").get<double>(),
                          d.at("delta_relative_energy").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed report: {}", e.what()));
  }
}

SimulationReport load_report(const std::filesystem::path& path) {
  return report_from_json(read_json_file(path));
}

}  // namespace powergame
