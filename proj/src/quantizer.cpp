#include "powergame/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace powergame {

LevelSet::LevelSet(std::vector<double> levels_dbm) : levels_(std::move(levels_dbm)) {
  if (levels_.empty()) throw std::invalid_argument("level set is empty");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (!(levels_[k] >= kLowestDbm && levels_[k] <= kHighestDbm)) {
      throw std::invalid_argument("level outside [-25, 0] dBm");
    }
    if (k > 0 && !(levels_[k] > levels_[k - 1])) {
      throw std::invalid_argument("levels must be strictly increasing");
    }
  }
}

LevelSet LevelSet::uniform(int count) {
  if (count < 1 || count > 26) {
    throw std::invalid_argument("uniform 1 dB grid holds 1 to 26 levels");
  }
  std::vector<double> out;
  for (int k = count - 1; k >= 0; --k) out.push_back(static_cast<double>(-k));
  return LevelSet(std::move(out));
}

LevelSet LevelSet::restricted(double lo_dbm, double hi_dbm) const {
  std::vector<double> kept;
  for (double l : levels_) {
    if (l >= lo_dbm && l <= hi_dbm) kept.push_back(l);
  }
  if (kept.empty()) throw std::invalid_argument("no level inside the requested range");
  return LevelSet(std::move(kept));
}

double quantize(double dbm, const LevelSet& levels) {
  const double x = std::clamp(dbm, kLowestDbm, kHighestDbm);
  const auto& l = levels.levels();
  const auto hi = std::lower_bound(l.begin(), l.end(), x);
  if (hi == l.begin()) return l.front();
  if (hi == l.end()) return l.back();
  const auto lo = hi - 1;
  return (x - *lo) <= (*hi - x) ? *lo : *hi;
}

StrategyProfile discretize_profile(const StrategyProfile& profile, const LevelSet& levels) {
  const LevelSet admissible = levels.restricted(strategy_to_dbm(profile.s_min()),
                                                strategy_to_dbm(profile.s_max()));
  std::vector<double> s;
  s.reserve(profile.size());
  for (NodeId i = 0; i < profile.size(); ++i) {
    s.push_back(dbm_to_strategy(quantize(profile.dbm(i), admissible)));
  }
  return StrategyProfile(std::move(s), profile.s_min(), profile.s_max());
}

double discrete_best_response(NodeId i, const StrategyProfile& profile,
                              const RadioChannel& channel, const GameParams& params,
                              const LevelSet& levels) {
  const LevelSet admissible = levels.restricted(strategy_to_dbm(profile.s_min()),
                                                strategy_to_dbm(profile.s_max()));
  const NodeUtility u(i, profile, channel, params);
  double best_level = admissible.lowest();
  double best_value = u(dbm_to_strategy(best_level));
  for (double level : admissible.levels()) {
    const double value = u(dbm_to_strategy(level));
    if (value > best_value) {
      best_value = value;
      best_level = level;
    }
  }
  return best_level;
}

EquilibriumResult solve_discrete(const StrategyProfile& initial, const RadioChannel& channel,
                                 const GameParams& params, const LevelSet& levels,
                                 const UpdateObserver& observer) {
  params.validate();
  if (initial.size() != channel.size()) {
    throw std::invalid_argument("solve_discrete: profile and channel sizes differ");
  }
  StrategyProfile current = discretize_profile(initial, levels);
  EquilibriumResult result{current, 0, {}, {}, false, {}, 0};
  result.potential_trace.push_back(potential(current, channel, params));
  result.strategy_trace.push_back(current.strategies());

  const auto order = update_sequence(current.size(), params.update_order);
  for (int sweep = 1; sweep <= params.max_sweeps; ++sweep) {
    StrategyProfile next = current;
    for (NodeId i : order) {
      const double s = dbm_to_strategy(discrete_best_response(i, next, channel, params, levels));
      if (observer) {
        const StrategyProfile before = next;
        next.set(i, s);
        observer(i, before, next);
      } else {
        next.set(i, s);
      }
    }
    result.sweeps_used = sweep;
    result.potential_trace.push_back(potential(next, channel, params));
    result.strategy_trace.push_back(next.strategies());

    // Fixed point once no node after the first in the order moved.
    bool later_moved = false;
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (next[order[k]] != current[order[k]]) later_moved = true;
    }
    current = std::move(next);
    if (!later_moved) {
      result.converged = true;
      break;
    }
    const auto& trace = result.strategy_trace;
    const auto repeat = std::find(trace.begin(), trace.end() - 1, trace.back());
    if (repeat != trace.end() - 1) {
      result.cycle_length = static_cast<int>(trace.end() - 1 - repeat);
      break;
    }
  }
  result.feasible = degree_feasibility(current, channel, params);
  result.profile = std::move(current);
  return result;
}

RegisterMap::RegisterMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("register map is empty");
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (!(entries_[k].dbm > entries_[k - 1].dbm) || !(entries_[k].id > entries_[k - 1].id)) {
      throw std::invalid_argument("register map must be strictly increasing in dBm and id");
    }
  }
}

RegisterMap RegisterMap::linear(const LevelSet& levels, int id_lo, int id_hi) {
  if (id_hi <= id_lo) throw std::invalid_argument("register id range is empty");
  std::vector<Entry> entries;
  const double span = levels.highest() - levels.lowest();
  for (double l : levels.levels()) {
    const double t = span > 0.0 ? (l - levels.lowest()) / span : 1.0;
    entries.push_back({l, static_cast<int>(std::lround(id_lo + t * (id_hi - id_lo)))});
  }
  return RegisterMap(std::move(entries));
}

RegisterMap RegisterMap::cc2420() {
  return RegisterMap({{-25.0, 3},
                      {-15.0, 7},
                      {-10.0, 11},
                      {-7.0, 15},
                      {-5.0, 19},
                      {-3.0, 23},
                      {-1.0, 27},
                      {0.0, 31}});
}

LevelSet RegisterMap::levels() const {
  std::vector<double> l;
  for (const auto& e : entries_) l.push_back(e.dbm);
  return LevelSet(std::move(l));
}

int to_register(double dbm, const RegisterMap& map) {
  const auto& e = map.entries();
  if (!(dbm >= e.front().dbm && dbm <= e.back().dbm)) {
    throw std::out_of_range("to_register: level outside the register table");
  }
  const double level = quantize(dbm, map.levels());
  for (const auto& entry : e) {
    if (entry.dbm == level) return entry.id;
  }
  throw std::logic_error("to_register: quantized level missing from table");
}

}  // namespace powergame
