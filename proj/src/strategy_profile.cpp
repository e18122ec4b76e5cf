#include "powergame/strategy_profile.hpp"

#include <stdexcept>
#include <utility>

namespace powergame {

StrategyProfile::StrategyProfile(std::vector<double> strategies, double s_min, double s_max)
    : s_(std::move(strategies)), s_min_(s_min), s_max_(s_max) {
  if (!(s_min > 0.0 && s_min < s_max && s_max <= kStrategyUpper)) {
    throw std::invalid_argument("strategy bounds must satisfy 0 < s_min < s_max <= 25");
  }
  for (double v : s_) {
    if (!(v >= s_min_ && v <= s_max_)) {
      throw std::invalid_argument("strategy outside [s_min, s_max]");
    }
  }
}

StrategyProfile StrategyProfile::uniform(std::size_t n, double value, double s_min, double s_max) {
  return StrategyProfile(std::vector<double>(n, value), s_min, s_max);
}

void StrategyProfile::set(NodeId i, double value) {
  if (!(value >= s_min_ && value <= s_max_)) {
    throw std::invalid_argument("strategy outside [s_min, s_max]");
  }
  s_.at(i) = value;
}

StrategyProfile StrategyProfile::with(NodeId i, double value) const {
  StrategyProfile copy = *this;
  copy.set(i, value);
  return copy;
}

std::vector<double> StrategyProfile::powers_mw() const {
  std::vector<double> out;
  out.reserve(s_.size());
  for (double v : s_) out.push_back(strategy_to_mw(v));
  return out;
}

}  // namespace powergame
