#include "powergame/packet_sim.hpp"

#include <fmt/ostream.h>

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

namespace powergame {

void TrafficConfig::validate() const {
  if (!(message_period_s > 0.0)) throw std::invalid_argument("traffic: message period must be positive");
  if (messages_per_node < 1) throw std::invalid_argument("traffic: messages_per_node must be >= 1");
  if (payload_bytes < 1) throw std::invalid_argument("traffic: payload_bytes must be >= 1");
  if (max_retries < 0) throw std::invalid_argument("traffic: max_retries must be >= 0");
}

TrafficConfig TrafficConfig::simulation_preset() { return TrafficConfig{}; }

TrafficConfig TrafficConfig::testbed_preset() {
  TrafficConfig t;
  t.max_retries = 3;
  t.message_period_s = 2.0;
  return t;
}

ReceiverPlan assign_receivers(const StrategyProfile& profile, const RadioChannel& channel,
                              int packet_bytes, double epsilon_link, ReceiverPolicy policy) {
  const auto powers = profile.powers_mw();
  ReceiverPlan plan(profile.size());
  for (NodeId i = 0; i < profile.size(); ++i) {
    OutgoingLinks links(channel, powers, i, packet_bytes);
    auto members = links.neighbors(powers[i], epsilon_link);
    if (members.empty()) continue;
    if (policy == ReceiverPolicy::round_robin) {
      plan[i] = std::move(members);
      continue;
    }
    NodeId best = members.front();
    for (NodeId j : members) {
      if (links.prr(j, powers[i]) > links.prr(best, powers[i])) best = j;
    }
    plan[i] = {best};
  }
  return plan;
}

TransmissionLog simulate(const StrategyProfile& profile, const RadioChannel& channel,
                         const TrafficConfig& traffic, const ReceiverPlan& receivers) {
  const std::size_t n = profile.size();
  if (receivers.size() != n || channel.size() != n) {
    throw std::invalid_argument("simulate: profile, channel and receiver plan sizes differ");
  }
  const auto powers = profile.powers_mw();
  std::vector<double> tx_dbm(n);
  std::vector<std::vector<double>> planned_prr(n);
  for (NodeId i = 0; i < n; ++i) {
    tx_dbm[i] = profile.dbm(i);
    if (receivers[i].empty()) continue;
    OutgoingLinks links(channel, powers, i, traffic.payload_bytes);
    for (NodeId j : receivers[i]) planned_prr[i].push_back(links.prr(j, powers[i]));
  }
  return simulate_links(tx_dbm, planned_prr, traffic, receivers);
}

TransmissionLog simulate_links(const std::vector<double>& tx_dbm,
                               const std::vector<std::vector<double>>& planned_prr,
                               const TrafficConfig& traffic, const ReceiverPlan& receivers) {
  traffic.validate();
  const std::size_t n = tx_dbm.size();
  if (receivers.size() != n || planned_prr.size() != n) {
    throw std::invalid_argument("simulate_links: size mismatch");
  }
  for (NodeId i = 0; i < n; ++i) {
    if (planned_prr[i].size() != receivers[i].size()) {
      throw std::invalid_argument("simulate_links: one PRR per planned receiver required");
    }
  }

  std::mt19937_64 rng(traffic.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int max_attempts = traffic.max_retries + 1;

  TransmissionLog log;
  log.max_retries = traffic.max_retries;
  log.messages.reserve(n * static_cast<std::size_t>(traffic.messages_per_node));
  for (NodeId i = 0; i < n; ++i) {
    if (receivers[i].empty()) log.orphan_senders.push_back(i);
  }

  for (int round = 0; round < traffic.messages_per_node; ++round) {
    for (NodeId i = 0; i < n; ++i) {
      MessageRecord msg;
      msg.sender = i;
      msg.tx_dbm = tx_dbm[i];
      msg.time_s = traffic.message_period_s * (round + static_cast<double>(i) / static_cast<double>(n));
      if (receivers[i].empty()) {
        msg.attempts = max_attempts;
        log.messages.push_back(msg);
        continue;
      }
      const std::size_t slot = static_cast<std::size_t>(round) % receivers[i].size();
      msg.receiver = static_cast<std::int64_t>(receivers[i][slot]);
      const double p = planned_prr[i][slot];
      for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const bool ok = uniform(rng) < p;
        msg.attempts = attempt;
        if (attempt == 1) msg.first_attempt_ok = ok;
        if (ok) {
          msg.delivered = true;
          break;
        }
      }
      log.messages.push_back(msg);
    }
  }
  return log;
}

PrrSummary empirical_prr(const TransmissionLog& log) {
  if (log.messages.empty()) throw std::invalid_argument("empirical_prr: empty log");
  std::map<std::pair<NodeId, NodeId>, LinkStats> by_link;
  std::size_t delivered = 0;
  for (const auto& m : log.messages) {
    if (m.delivered) ++delivered;
    if (m.receiver == kNoReceiver) continue;
    const auto key = std::make_pair(m.sender, static_cast<NodeId>(m.receiver));
    auto& s = by_link[key];
    s.sender = key.first;
    s.receiver = key.second;
    ++s.first_attempts;
    if (m.first_attempt_ok) ++s.first_successes;
  }
  PrrSummary out;
  double sum = 0.0;
  for (auto& [key, s] : by_link) {
    s.empirical_prr = static_cast<double>(s.first_successes) / s.first_attempts;
    sum += s.empirical_prr;
    out.links.push_back(s);
  }
  out.avg_prr = out.links.empty() ? 0.0 : sum / static_cast<double>(out.links.size());
  out.delivery_ratio = static_cast<double>(delivered) / static_cast<double>(log.messages.size());
  return out;
}

void write_log_csv(const TransmissionLog& log, std::ostream& out) {
  out << "sender,receiver,tx_dbm,attempts,delivered\n";
  for (const auto& m : log.messages) {
    fmt::print(out, "{},{},{},{},{}\n", m.sender, m.receiver, m.tx_dbm, m.attempts,
               m.delivered ? 1 : 0);
  }
}

double relative_energy(const TransmissionLog& log) {
  if (log.messages.empty()) throw std::invalid_argument("relative_energy: empty log");
  double energy = 0.0;
  double attempts = 0.0;
  for (const auto& m : log.messages) {
    energy += m.attempts * dbm_to_mw(m.tx_dbm);
    attempts += m.attempts;
  }
  if (attempts == 0.0) throw std::invalid_argument("relative_energy: no attempts logged");
  // 0 dBm is 1 mW, so the full-power reference mean is exactly 1.
  return energy / attempts;
}

LinkClass classify_link(double prr_value) {
  if (prr_value >= 0.8) return LinkClass::good;
  if (prr_value < 0.3) return LinkClass::bad;
  return LinkClass::intermediate;
}

const char* to_string(LinkClass c) {
  switch (c) {
    case LinkClass::good: return "good";
    case LinkClass::intermediate: return "intermediate";
    case LinkClass::bad: return "bad";
  }
  return "unknown";
}

LinkCdf link_cdf(const std::vector<double>& per_link_prr) {
  if (per_link_prr.empty()) throw std::invalid_argument("link_cdf: no links");
  std::vector<double> sorted = per_link_prr;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  LinkCdf out;
  std::size_t good = 0;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    out.points.push_back({sorted[k], static_cast<double>(k + 1) / n});
    switch (classify_link(sorted[k])) {
      case LinkClass::good: ++good; break;
      case LinkClass::bad: ++bad; break;
      case LinkClass::intermediate: break;
    }
  }
  out.fractions.good = static_cast<double>(good) / n;
  out.fractions.bad = static_cast<double>(bad) / n;
  out.fractions.intermediate = static_cast<double>(sorted.size() - good - bad) / n;
  return out;
}

}  // namespace powergame
