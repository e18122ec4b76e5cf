#pragma once

#include <utility>
#include <vector>

#include "powergame/game.hpp"

namespace powergame {

inline constexpr double kLowestDbm = -25.0;
inline constexpr double kHighestDbm = 0.0;

/// Sorted discrete transmit levels in dBm, all within [-25, 0].
class LevelSet {
 public:
  /// Throws std::invalid_argument unless strictly increasing and in range.
  explicit LevelSet(std::vector<double> levels_dbm);

  /// 1 dB grid ending at 0 dBm. 25 levels gives {-24, ..., 0}; 26 gives {-25, ..., 0}.
  static LevelSet uniform(int count = 25);

  const std::vector<double>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  double lowest() const { return levels_.front(); }
  double highest() const { return levels_.back(); }

  /// Levels inside [lo_dbm, hi_dbm]. Throws when none remain.
  LevelSet restricted(double lo_dbm, double hi_dbm) const;

  bool operator==(const LevelSet&) const = default;

 private:
  std::vector<double> levels_;
};

/// Nearest level after clamping to [-25, 0]; exact midpoints go to the lower level.
double quantize(double dbm, const LevelSet& levels);

/// Per-node quantization of the dB view, restricted to levels that fit the
/// profile's bounds.
StrategyProfile discretize_profile(const StrategyProfile& profile, const LevelSet& levels);

/// Exhaustive argmax of u_i over the admissible levels; ties go to lower power.
double discrete_best_response(NodeId i, const StrategyProfile& profile,
                              const RadioChannel& channel, const GameParams& params,
                              const LevelSet& levels);

/// Gauss-Seidel dynamics played directly on the level grid. Stops at the
/// first sweep after which the profile is a fixed point, or as soon as a
/// sweep reproduces an earlier profile, recording the cycle length.
EquilibriumResult solve_discrete(const StrategyProfile& initial, const RadioChannel& channel,
                                 const GameParams& params, const LevelSet& levels,
                                 const UpdateObserver& observer = {});

/// Monotone dBm -> transceiver register id table.
class RegisterMap {
 public:
  struct Entry {
    double dbm;
    int id;
    bool operator==(const Entry&) const = default;
  };

  /// Throws std::invalid_argument unless both columns strictly increase.
  explicit RegisterMap(std::vector<Entry> entries);

  /// Linear map of the levels onto [id_lo, id_hi], rounded to integers.
  static RegisterMap linear(const LevelSet& levels, int id_lo = 3, int id_hi = 31);

  /// CC2420 PA_LEVEL table (8 levels, -25 to 0 dBm).
  static RegisterMap cc2420();

  const std::vector<Entry>& entries() const { return entries_; }
  LevelSet levels() const;

  bool operator==(const RegisterMap&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Register id for a dBm value. Values between table levels are quantized
/// onto the table first; values outside [lowest, highest] throw std::out_of_range.
int to_register(double dbm, const RegisterMap& map);

}  // namespace powergame
