#pragma once

#include <cstddef>
#include <vector>

#include "powergame/channel.hpp"

namespace powergame {

/// Per-node power strategies on a common box [s_min, s_max] in strategy units.
class StrategyProfile {
 public:
  /// Throws std::invalid_argument unless 0 < s_min < s_max <= 25 and every
  /// entry lies in the box.
  StrategyProfile(std::vector<double> strategies, double s_min, double s_max);

  static StrategyProfile uniform(std::size_t n, double value, double s_min, double s_max);

  std::size_t size() const { return s_.size(); }
  double operator[](NodeId i) const { return s_[i]; }
  const std::vector<double>& strategies() const { return s_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }

  /// Throws std::invalid_argument when value is outside the box.
  void set(NodeId i, double value);
  StrategyProfile with(NodeId i, double value) const;

  double dbm(NodeId i) const { return strategy_to_dbm(s_[i]); }
  double mw(NodeId i) const { return strategy_to_mw(s_[i]); }
  std::vector<double> powers_mw() const;

  bool operator==(const StrategyProfile&) const = default;

 private:
  std::vector<double> s_;
  double s_min_;
  double s_max_;
};

}  // namespace powergame
