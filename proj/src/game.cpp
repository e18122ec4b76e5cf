#include "powergame/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "powergame/topology.hpp"

namespace powergame {

void GameParams::validate() const {
  if (!(ncr_scale > 0.0)) throw std::invalid_argument("game: ncr_scale must be positive");
  if (!(cost_denominator > 0.0)) throw std::invalid_argument("game: cost_denominator must be positive");
  if (!(log_base > 1.0)) throw std::invalid_argument("game: log_base must exceed 1");
  if (packet_bytes < 1) throw std::invalid_argument("game: packet_bytes must be >= 1");
  if (!(epsilon_link > 0.0 && epsilon_link <= 1.0)) {
    throw std::invalid_argument("game: epsilon_link must lie in (0, 1]");
  }
  if (degree_target < 0) throw std::invalid_argument("game: degree_target must be >= 0");
  if (!(smallworld_delta > 0.0)) throw std::invalid_argument("game: smallworld_delta must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("game: max_sweeps must be >= 1");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("game: convergence_tol must be positive");
  if (!(br_tol > 0.0)) throw std::invalid_argument("game: br_tol must be positive");
  if (prescan_samples < 2) throw std::invalid_argument("game: prescan_samples must be >= 2");
}

int required_degree(const GameParams& params, std::size_t node_count) {
  if (params.degree_rule == DegreeRule::fixed_k) return params.degree_target;
  if (node_count < 2) return 1;
  const auto sw = smallworld_threshold(node_count, params.smallworld_delta);
  return static_cast<int>(std::floor(sw.degree_bound())) + 1;
}

// ---------------------------------------------------------------------------
// NodeUtility
// ---------------------------------------------------------------------------

NodeUtility::NodeUtility(NodeId node, const StrategyProfile& profile, const RadioChannel& channel,
                         const GameParams& params)
    : node_(node), channel_(&channel), params_(&params),
      powers_mw_(profile.powers_mw()),
      links_(channel, powers_mw_, node, params.packet_bytes),
      required_(required_degree(params, profile.size())) {}

std::size_t NodeUtility::degree(double s) const {
  return links_.degree(strategy_to_mw(s), params_->epsilon_link);
}

bool NodeUtility::degree_satisfied(double s) const {
  return degree(s) >= static_cast<std::size_t>(required_);
}

double NodeUtility::ncr(double s) const {
  const double own = strategy_to_mw(s);
  const auto members = links_.neighbors(own, params_->epsilon_link);
  if (members.empty()) return 0.0;
  double sum = 0.0;
  for (NodeId j : members) sum += links_.prr(j, own);

  if (params_->ncr_denominator == NcrDenominator::neighbors) {
    return sum / static_cast<double>(members.size());
  }

  // Union reading: the neighbors' own neighbor sets, evaluated with this
  // node's power set to s.
  std::vector<double> powers = powers_mw_;
  powers[node_] = own;
  std::vector<bool> in_union(powers.size(), false);
  std::size_t union_size = 0;
  for (NodeId j : members) {
    OutgoingLinks theirs(*channel_, powers, j, params_->packet_bytes);
    for (NodeId t : theirs.neighbors(powers[j], params_->epsilon_link)) {
      if (!in_union[t]) {
        in_union[t] = true;
        ++union_size;
      }
    }
  }
  if (union_size == 0) return 0.0;
  return std::min(1.0, sum / static_cast<double>(union_size));
}

double NodeUtility::cost(double s) const {
  const double r = s / params_->cost_denominator;
  return r * r;
}

double NodeUtility::operator()(double s) const {
  if (!degree_satisfied(s)) return -cost(s);
  const double benefit =
      std::log1p(params_->ncr_scale * ncr(s)) / std::log(params_->log_base);
  return benefit - cost(s);
}

double ncr(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
           const GameParams& params) {
  return NodeUtility(i, profile, channel, params).ncr(profile[i]);
}

double utility(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
               const GameParams& params) {
  return NodeUtility(i, profile, channel, params)(profile[i]);
}

double potential(const StrategyProfile& profile, const RadioChannel& channel,
                 const GameParams& params) {
  double v = 0.0;
  for (NodeId m = 0; m < profile.size(); ++m) v += utility(m, profile, channel, params);
  return v;
}

// ---------------------------------------------------------------------------
// Best response
// ---------------------------------------------------------------------------

namespace {

struct Sample {
  double x;
  double value;
};

// Golden-section maximization on [a, b]; returns the best point evaluated.
template <typename F>
Sample golden_section_max(const F& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  Sample best = fc >= fd ? Sample{c, fc} : Sample{d, fd};
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc > best.value || (fc == best.value && c < best.x)) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd > best.value || (fd == best.value && d < best.x)) best = {d, fd};
    }
  }
  return best;
}

}  // namespace

BestResponse best_response_detail(NodeId i, const StrategyProfile& profile,
                                  const RadioChannel& channel, const GameParams& params) {
  const NodeUtility u(i, profile, channel, params);
  const double s_min = profile.s_min();
  const double s_max = profile.s_max();

  const auto threshold =
      min_power_for_degree(u.links(), s_min, s_max, params.epsilon_link,
                           required_degree(params, profile.size()), params.br_tol);
  if (!threshold) {
    // Only the cost branch is reachable; it decreases in s.
    return {s_min, u(s_min), false, false};
  }

  // Degree is monotone in own power, so [lo, s_max] is exactly the region
  // where the reliability branch applies.
  const double lo = *threshold;
  const int n = lo < s_max ? params.prescan_samples : 1;
  std::vector<Sample> scan;
  scan.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double x = n == 1 ? lo : lo + (s_max - lo) * k / (n - 1);
    scan.push_back({x, u(x)});
  }

  std::size_t best_k = 0;
  int peaks = 0;
  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (scan[k].value > scan[best_k].value) best_k = k;
    const bool above_left = k == 0 || scan[k].value > scan[k - 1].value;
    const bool above_right = k + 1 == scan.size() || scan[k].value > scan[k + 1].value;
    if (above_left && above_right) ++peaks;
  }

  Sample best = scan[best_k];
  if (scan.size() > 1) {
    const double a = scan[best_k == 0 ? 0 : best_k - 1].x;
    const double b = scan[std::min(best_k + 1, scan.size() - 1)].x;
    const Sample refined = golden_section_max(u, a, b, params.br_tol);
    if (refined.value > best.value) best = refined;
  }

  BestResponse out{best.x, best.value, true, peaks > 1};
  if (lo > s_min) {
    const double floor_value = u(s_min);
    if (floor_value >= best.value) {
      out.strategy = s_min;
      out.utility = floor_value;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

std::vector<NodeId> update_sequence(std::size_t n, UpdateOrder order) {
  std::vector<NodeId> seq(n);
  for (NodeId i = 0; i < n; ++i) seq[i] = order == UpdateOrder::ascending ? i : n - 1 - i;
  return seq;
}

StrategyProfile gauss_seidel_sweep(const StrategyProfile& profile, const RadioChannel& channel,
                                   const GameParams& params, const UpdateObserver& observer,
                                   int* non_unimodal_count) {
  StrategyProfile current = profile;
  for (NodeId i : update_sequence(profile.size(), params.update_order)) {
    const auto br = best_response_detail(i, current, channel, params);
    if (non_unimodal_count != nullptr && br.non_unimodal) ++*non_unimodal_count;
    if (observer) {
      const StrategyProfile before = current;
      current.set(i, br.strategy);
      observer(i, before, current);
    } else {
      current.set(i, br.strategy);
    }
  }
  return current;
}

std::vector<bool> degree_feasibility(const StrategyProfile& profile, const RadioChannel& channel,
                                     const GameParams& params) {
  std::vector<bool> out(profile.size());
  for (NodeId i = 0; i < profile.size(); ++i) {
    out[i] = NodeUtility(i, profile, channel, params).degree_satisfied(profile[i]);
  }
  return out;
}

namespace {

// Every node's current strategy is within the convergence tolerance of its
// best-response utility against the final profile.
bool epsilon_stable(const StrategyProfile& profile, const RadioChannel& channel,
                    const GameParams& params) {
  for (NodeId i = 0; i < profile.size(); ++i) {
    const auto br = best_response_detail(i, profile, channel, params);
    if (br.utility - utility(i, profile, channel, params) > params.convergence_tol) return false;
  }
  return true;
}

}  // namespace

EquilibriumResult solve(const StrategyProfile& initial, const RadioChannel& channel,
                        const GameParams& params, const UpdateObserver& observer) {
  params.validate();
  if (initial.size() != channel.size()) {
    throw std::invalid_argument("solve: profile and channel sizes differ");
  }
  EquilibriumResult result{initial, 0, {}, {}, false, {}, 0};
  result.potential_trace.push_back(potential(initial, channel, params));
  result.strategy_trace.push_back(initial.strategies());

  const auto order = update_sequence(initial.size(), params.update_order);
  StrategyProfile current = initial;
  for (int sweep = 1; sweep <= params.max_sweeps; ++sweep) {
    StrategyProfile next =
        gauss_seidel_sweep(current, channel, params, observer, &result.non_unimodal_scans);
    result.sweeps_used = sweep;
    result.potential_trace.push_back(potential(next, channel, params));
    result.strategy_trace.push_back(next.strategies());

    // Largest move among the nodes after the first in the order.
    double moved = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
      moved = std::max(moved, std::abs(next[order[k]] - current[order[k]]));
    }
    current = std::move(next);
    if (moved < params.convergence_tol && epsilon_stable(current, channel, params)) {
      result.converged = true;
      break;
    }
  }
  result.feasible = degree_feasibility(current, channel, params);
  result.profile = std::move(current);
  return result;
}

EquilibriumCheck verify_equilibrium(const StrategyProfile& profile, const RadioChannel& channel,
                                    const GameParams& params, double epsilon, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("verify_equilibrium: grid_step must be positive");
  EquilibriumCheck check;
  check.worst_gain = -std::numeric_limits<double>::infinity();
  const double s_min = profile.s_min();
  const double s_max = profile.s_max();
  for (NodeId i = 0; i < profile.size(); ++i) {
    const NodeUtility u(i, profile, channel, params);
    const double base = u(profile[i]);
    const auto consider = [&](double s) {
      const double gain = u(s) - base;
      if (gain > check.worst_gain) {
        check.worst_gain = gain;
        check.worst_node = i;
        check.worst_deviation = s;
      }
    };
    for (long k = 0;; ++k) {
      const double s = s_min + static_cast<double>(k) * grid_step;
      if (s > s_max) break;
      consider(s);
    }
    consider(s_max);
  }
  check.is_equilibrium = check.worst_gain <= epsilon;
  return check;
}

double exact_potential_residual(const StrategyProfile& profile, NodeId i, double s_prime,
                                const RadioChannel& channel, const GameParams& params) {
  const StrategyProfile moved = profile.with(i, s_prime);
  const double du = utility(i, moved, channel, params) - utility(i, profile, channel, params);
  const double dv = potential(moved, channel, params) - potential(profile, channel, params);
  return std::abs(du - dv);
}

}  // namespace powergame
