#include "powergame/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace powergame {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Standard-normal draw keyed on the unordered pair {a, b} and the seed.
double pair_normal(std::uint64_t seed, Position a, Position b) {
  if (std::make_pair(b.x, b.y) < std::make_pair(a.x, a.y)) {
    std::swap(a, b);
  }
  std::uint64_t h = splitmix64(seed);
  for (double v : {a.x, a.y, b.x, b.y}) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  std::mt19937_64 rng(h);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

}  // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

TxPower::TxPower(double strategy_units) : s_(strategy_units) {
  if (!(strategy_units >= 0.0 && strategy_units <= kStrategyUpper)) {
    throw std::invalid_argument("TxPower: strategy units outside [0, 25]");
  }
}

TxPower TxPower::from_dbm(double dbm) { return TxPower(dbm_to_strategy(dbm)); }

TxPower TxPower::from_mw(double mw) {
  if (!(mw > 0.0)) {
    throw std::invalid_argument("TxPower: non-positive power in mW");
  }
  return from_dbm(mw_to_dbm(mw));
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void PathLossModel::validate() const {
  if (!(reference_distance_m > 0.0) || !std::isfinite(reference_distance_m)) {
    throw std::invalid_argument("path loss: reference distance must be positive");
  }
  if (!(reference_gain_db <= 0.0) || !std::isfinite(reference_gain_db)) {
    throw std::invalid_argument("path loss: reference gain must be <= 0 dB");
  }
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("path loss: exponent must be positive");
  }
  if (!(shadowing_sigma_db >= 0.0) || !std::isfinite(shadowing_sigma_db)) {
    throw std::invalid_argument("path loss: shadowing sigma must be >= 0");
  }
}

double gain(const PathLossModel& model, const Position& a, const Position& b) {
  if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) || !std::isfinite(b.y)) {
    throw std::invalid_argument("gain: non-finite position");
  }
  const double d = std::max(distance(a, b), model.reference_distance_m);
  double gain_db =
      model.reference_gain_db - 10.0 * model.exponent * std::log10(d / model.reference_distance_m);
  if (model.shadowing_sigma_db > 0.0) {
    gain_db += model.shadowing_sigma_db * pair_normal(model.seed, a, b);
  }
  return std::pow(10.0, gain_db / 10.0);
}

GainMatrix build_gain_matrix(std::span<const Position> positions, const PathLossModel& model) {
  if (positions.size() < 2) {
    throw std::invalid_argument("build_gain_matrix: need at least 2 nodes");
  }
  model.validate();
  const std::size_t n = positions.size();
  GainMatrix h(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double g = gain(model, positions[i], positions[j]);
      h.set(i, j, g);
      h.set(j, i, g);
    }
  }
  return h;
}

void NoiseFloor::validate() const {
  if (!(mw > 0.0) || !std::isfinite(mw)) {
    throw std::invalid_argument("noise floor must be positive");
  }
}

void RadioChannel::validate() const {
  noise.validate();
  if (!(interference_activity >= 0.0 && interference_activity <= 1.0)) {
    throw std::invalid_argument("interference activity must lie in [0, 1]");
  }
  if (gains.size() == 0) {
    throw std::invalid_argument("radio channel has no nodes");
  }
}

double interference_mw(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
                       const GainMatrix& gains) {
  double sum = 0.0;
  for (NodeId t = 0; t < powers_mw.size(); ++t) {
    if (t == sender || t == receiver) continue;
    sum += gains(t, receiver) * powers_mw[t];
  }
  return sum;
}

double sinr(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
            const GainMatrix& gains, NoiseFloor noise, double interference_activity) {
  if (sender == receiver) {
    throw std::invalid_argument("sinr: sender and receiver must differ");
  }
  if (sender >= gains.size() || receiver >= gains.size() || powers_mw.size() != gains.size()) {
    throw std::out_of_range("sinr: node id or power vector size mismatch");
  }
  const double denom =
      interference_activity * interference_mw(sender, receiver, powers_mw, gains) + noise.mw;
  return gains(sender, receiver) * powers_mw[sender] / denom;
}

double ber(double sinr_value) {
  if (!(sinr_value >= 0.0)) {
    throw std::invalid_argument("ber: negative SINR");
  }
  if (std::isinf(sinr_value)) return 0.0;
  // 1 - sqrt(x) == (1 - x) / (1 + sqrt(x)) and 1 - s/(1+s) == 1/(1+s).
  const double ratio = sinr_value / (1.0 + sinr_value);
  return 0.5 / ((1.0 + sinr_value) * (1.0 + std::sqrt(ratio)));
}

double prr(double ber_value, int packet_bytes) {
  if (!(ber_value >= 0.0 && ber_value <= 1.0)) {
    throw std::invalid_argument("prr: BER outside [0, 1]");
  }
  if (packet_bytes < 1) {
    throw std::invalid_argument("prr: packet length must be >= 1 byte");
  }
  if (ber_value == 1.0) return 0.0;
  return std::exp(8.0 * packet_bytes * std::log1p(-ber_value));
}

double link_prr(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
                const RadioChannel& channel, int packet_bytes) {
  const double s = sinr(sender, receiver, powers_mw, channel.gains, channel.noise,
                        channel.interference_activity);
  return prr(ber(s), packet_bytes);
}

OutgoingLinks::OutgoingLinks(const RadioChannel& channel, std::span<const double> powers_mw,
                             NodeId sender, int packet_bytes)
    : gains_(&channel.gains), sender_(sender), packet_bytes_(packet_bytes),
      denominators_(channel.size(), 0.0) {
  if (powers_mw.size() != channel.size() || sender >= channel.size()) {
    throw std::out_of_range("OutgoingLinks: size mismatch");
  }
  for (NodeId j = 0; j < channel.size(); ++j) {
    if (j == sender) continue;
    denominators_[j] = channel.interference_activity *
                           interference_mw(sender, j, powers_mw, channel.gains) +
                       channel.noise.mw;
  }
}

double OutgoingLinks::sinr(NodeId receiver, double own_mw) const {
  return (*gains_)(sender_, receiver) * own_mw / denominators_[receiver];
}

double OutgoingLinks::prr(NodeId receiver, double own_mw) const {
  return powergame::prr(ber(sinr(receiver, own_mw)), packet_bytes_);
}

std::vector<NodeId> OutgoingLinks::neighbors(double own_mw, double epsilon_link) const {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < size(); ++j) {
    if (j != sender_ && prr(j, own_mw) >= epsilon_link) out.push_back(j);
  }
  return out;
}

std::size_t OutgoingLinks::degree(double own_mw, double epsilon_link) const {
  std::size_t d = 0;
  for (NodeId j = 0; j < size(); ++j) {
    if (j != sender_ && prr(j, own_mw) >= epsilon_link) ++d;
  }
  return d;
}

}  // namespace powergame
