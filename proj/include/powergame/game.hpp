#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "powergame/channel.hpp"
#include "powergame/strategy_profile.hpp"

namespace powergame {

enum class DegreeRule {
  fixed_k,     // degree >= degree_target
  smallworld,  // degree > m_nearest + shortcut_expectation
};

enum class NcrDenominator {
  neighbors,       // mean PRR over the 1-hop neighbor set
  neighbor_union,  // sum of PRRs over |union of the neighbors' neighbor sets|
};

enum class UpdateOrder { ascending, descending };

struct GameParams {
  double ncr_scale{9.0};
  double cost_denominator{25.0};
  double log_base{10.0};
  int packet_bytes{25};
  double epsilon_link{0.01};
  int degree_target{6};
  DegreeRule degree_rule{DegreeRule::fixed_k};
  double smallworld_delta{0.1};
  NcrDenominator ncr_denominator{NcrDenominator::neighbors};
  int max_sweeps{100};
  double convergence_tol{1e-4};
  double br_tol{1e-6};
  int prescan_samples{64};
  UpdateOrder update_order{UpdateOrder::ascending};

  void validate() const;
  bool operator==(const GameParams&) const = default;
};

/// Minimum neighbor count a node must reach for the reliability term to count.
int required_degree(const GameParams& params, std::size_t node_count);

/// Utility of one node as a function of its own strategy, everything else frozen.
class NodeUtility {
 public:
  NodeUtility(NodeId node, const StrategyProfile& profile, const RadioChannel& channel,
              const GameParams& params);

  NodeId node() const { return node_; }
  std::size_t degree(double s) const;
  bool degree_satisfied(double s) const;
  double ncr(double s) const;
  double cost(double s) const;
  double operator()(double s) const;

  const OutgoingLinks& links() const { return links_; }

 private:
  NodeId node_;
  const RadioChannel* channel_;
  const GameParams* params_;
  std::vector<double> powers_mw_;
  OutgoingLinks links_;
  int required_;
};

double ncr(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
           const GameParams& params);
double utility(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
               const GameParams& params);
double potential(const StrategyProfile& profile, const RadioChannel& channel,
                 const GameParams& params);

struct BestResponse {
  double strategy{0.0};
  double utility{0.0};
  bool degree_feasible{false};  // degree target reachable at s_max
  bool non_unimodal{false};     // pre-scan saw more than one interior peak
};

BestResponse best_response_detail(NodeId i, const StrategyProfile& profile,
                                  const RadioChannel& channel, const GameParams& params);

inline double best_response(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
                            const GameParams& params) {
  return best_response_detail(i, profile, channel, params).strategy;
}

/// Called after every coordinate update with the profile before and after it.
using UpdateObserver =
    std::function<void(NodeId node, const StrategyProfile& before, const StrategyProfile& after)>;

std::vector<NodeId> update_sequence(std::size_t n, UpdateOrder order);

/// One Gauss-Seidel pass: nodes update in order, each seeing the already
/// updated strategies of the nodes before it.
StrategyProfile gauss_seidel_sweep(const StrategyProfile& profile, const RadioChannel& channel,
                                   const GameParams& params, const UpdateObserver& observer = {},
                                   int* non_unimodal_count = nullptr);

struct EquilibriumResult {
  StrategyProfile profile;
  int sweeps_used{0};
  std::vector<double> potential_trace;                // initial profile first
  std::vector<std::vector<double>> strategy_trace;    // initial profile first
  bool converged{false};
  std::vector<bool> feasible;  // degree constraint met at the final profile
  int non_unimodal_scans{0};
  int cycle_length{0};  // period of a repeated grid profile, 0 when none was seen
};

/// Gauss-Seidel best-response dynamics. Stops once a sweep leaves every node
/// after the first in the order within convergence_tol of its previous value
/// and no node can gain more than convergence_tol by re-optimizing.
EquilibriumResult solve(const StrategyProfile& initial, const RadioChannel& channel,
                        const GameParams& params, const UpdateObserver& observer = {});

std::vector<bool> degree_feasibility(const StrategyProfile& profile, const RadioChannel& channel,
                                     const GameParams& params);

struct EquilibriumCheck {
  bool is_equilibrium{true};
  double worst_gain{0.0};  // largest u_i(s', p_-i) - u_i(p) seen on the grid
  NodeId worst_node{0};
  double worst_deviation{0.0};
};

EquilibriumCheck verify_equilibrium(const StrategyProfile& profile, const RadioChannel& channel,
                                    const GameParams& params, double epsilon, double grid_step);

/// |[u_i(s', p_-i) - u_i(p)] - [V(s', p_-i) - V(p)]|
double exact_potential_residual(const StrategyProfile& profile, NodeId i, double s_prime,
                                const RadioChannel& channel, const GameParams& params);

}  // namespace powergame
