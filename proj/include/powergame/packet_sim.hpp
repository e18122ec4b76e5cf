#pragma once

#include <cstdint>
#include <ostream>
#include <optional>
#include <vector>

#include "powergame/channel.hpp"
#include "powergame/strategy_profile.hpp"

namespace powergame {

enum class ReceiverPolicy {
  best_link,    // highest analytic PRR neighbor
  round_robin,  // cycle through all neighbors
};

struct TrafficConfig {
  double message_period_s{2.0};
  int messages_per_node{200};
  int payload_bytes{25};
  int max_retries{30};
  std::uint64_t seed{1};
  ReceiverPolicy receiver_policy{ReceiverPolicy::best_link};

  void validate() const;
  bool operator==(const TrafficConfig&) const = default;

  /// Simulation-style defaults: 30 retries.
  static TrafficConfig simulation_preset();
  /// Testbed-style defaults: 3 retries, one message every 2 s.
  static TrafficConfig testbed_preset();
};

/// Receivers each sender cycles through; empty when the sender has no neighbor.
using ReceiverPlan = std::vector<std::vector<NodeId>>;

ReceiverPlan assign_receivers(const StrategyProfile& profile, const RadioChannel& channel,
                              int packet_bytes, double epsilon_link, ReceiverPolicy policy);

inline constexpr std::int64_t kNoReceiver = -1;

struct MessageRecord {
  NodeId sender{0};
  std::int64_t receiver{kNoReceiver};
  double tx_dbm{0.0};
  int attempts{0};
  bool delivered{false};
  bool first_attempt_ok{false};
  double time_s{0.0};

  bool operator==(const MessageRecord&) const = default;
};

struct TransmissionLog {
  std::vector<MessageRecord> messages;
  int max_retries{0};
  std::vector<NodeId> orphan_senders;  // senders with no neighbor at their power

  bool operator==(const TransmissionLog&) const = default;
};

/// Bernoulli trials over the analytic link PRRs: each message is retried up
/// to max_retries times after the first attempt. Deterministic per seed.
TransmissionLog simulate(const StrategyProfile& profile, const RadioChannel& channel,
                         const TrafficConfig& traffic, const ReceiverPlan& receivers);

/// Core of simulate() with the link PRRs supplied directly: planned_prr[i][k]
/// is the success probability toward receivers[i][k].
TransmissionLog simulate_links(const std::vector<double>& tx_dbm,
                               const std::vector<std::vector<double>>& planned_prr,
                               const TrafficConfig& traffic, const ReceiverPlan& receivers);

/// CSV with header sender,receiver,tx_dbm,attempts,delivered; one row per message.
void write_log_csv(const TransmissionLog& log, std::ostream& out);

struct LinkStats {
  NodeId sender{0};
  NodeId receiver{0};
  int first_attempts{0};
  int first_successes{0};
  double empirical_prr{0.0};

  bool operator==(const LinkStats&) const = default;
};

struct PrrSummary {
  std::vector<LinkStats> links;  // sorted by (sender, receiver)
  double avg_prr{0.0};           // unweighted mean over links, first attempts only
  double delivery_ratio{0.0};    // delivered / messages, retries included
};

/// Throws std::invalid_argument on an empty log.
PrrSummary empirical_prr(const TransmissionLog& log);

/// Attempt-weighted mean linear power normalized to 0 dBm. Throws on an empty log.
double relative_energy(const TransmissionLog& log);

struct LinkClassFractions {
  double good{0.0};          // PRR >= 0.8
  double intermediate{0.0};  // 0.3 <= PRR < 0.8
  double bad{0.0};           // PRR < 0.3

  bool operator==(const LinkClassFractions&) const = default;
};

enum class LinkClass { good, intermediate, bad };
LinkClass classify_link(double prr_value);
const char* to_string(LinkClass c);

struct CdfPoint {
  double prr{0.0};
  double cumulative_fraction{0.0};

  bool operator==(const CdfPoint&) const = default;
};

struct LinkCdf {
  std::vector<CdfPoint> points;
  LinkClassFractions fractions;
};

/// Empirical CDF of per-link PRR plus the good/intermediate/bad split.
/// Throws std::invalid_argument for an empty input.
LinkCdf link_cdf(const std::vector<double>& per_link_prr);

}  // namespace powergame
