#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace powergame {

using NodeId = std::size_t;

// ---------------------------------------------------------------------------
// Power units
//
// The game plays on a strategy variable s in [0, 25]. The radio sees
// dBm = s - 25, so s = 25 is 0 dBm (1 mW) and s = 0 is -25 dBm.
// ---------------------------------------------------------------------------

inline constexpr double kStrategyUpper = 25.0;

constexpr double strategy_to_dbm(double s) { return s - kStrategyUpper; }
constexpr double dbm_to_strategy(double dbm) { return dbm + kStrategyUpper; }
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
inline double strategy_to_mw(double s) { return dbm_to_mw(strategy_to_dbm(s)); }

/// Transmit power with the three mutually consistent views.
class TxPower {
 public:
  /// Throws std::invalid_argument outside [0, 25].
  explicit TxPower(double strategy_units);
  static TxPower from_dbm(double dbm);
  static TxPower from_mw(double mw);

  double strategy() const { return s_; }
  double dbm() const { return strategy_to_dbm(s_); }
  double mw() const { return strategy_to_mw(s_); }

 private:
  double s_;
};

// ---------------------------------------------------------------------------
// Geometry and propagation
// ---------------------------------------------------------------------------

struct Position {
  double x{0.0};
  double y{0.0};

  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

/// Log-distance path loss with optional log-normal shadowing.
///
/// gain_db(d) = reference_gain_db - 10 * exponent * log10(max(d, d0) / d0) + X
/// where X ~ N(0, shadowing_sigma_db^2) is a fixed function of (seed, pair).
struct PathLossModel {
  double reference_distance_m{1.0};
  double reference_gain_db{-40.0};
  double exponent{3.3};
  double shadowing_sigma_db{0.0};
  std::uint64_t seed{0};

  void validate() const;
  bool operator==(const PathLossModel&) const = default;
};

/// Linear channel gain between two positions. Symmetric in (a, b), including
/// the shadowing draw.
double gain(const PathLossModel& model, const Position& a, const Position& b);

/// Dense M x M matrix of linear gains; entry (t, r) is the gain from
/// transmitter t to receiver r. The diagonal is stored as zero and never read.
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(NodeId from, NodeId to) const { return data_[from * n_ + to]; }
  void set(NodeId from, NodeId to, double value) { data_[from * n_ + to] = value; }

  bool operator==(const GainMatrix&) const = default;

 private:
  std::size_t n_{0};
  std::vector<double> data_;
};

/// Throws std::invalid_argument for fewer than two positions.
GainMatrix build_gain_matrix(std::span<const Position> positions, const PathLossModel& model);

struct NoiseFloor {
  double mw{1e-10};

  void validate() const;
};

/// Everything the link equations need besides the transmit powers.
///
/// `interference_activity` weights every interferer's received power by the
/// fraction of time it is on air. 1.0 is the worst case in which all nodes
/// transmit simultaneously.
struct RadioChannel {
  GainMatrix gains;
  NoiseFloor noise;
  double interference_activity{1.0};

  std::size_t size() const { return gains.size(); }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Link equations
// ---------------------------------------------------------------------------

/// Sum over t != sender, t != receiver of gains(t, receiver) * powers_mw[t].
double interference_mw(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
                       const GainMatrix& gains);

/// Signal over (activity * interference + noise) for the link sender -> receiver.
/// Throws std::invalid_argument when sender == receiver.
double sinr(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
            const GainMatrix& gains, NoiseFloor noise, double interference_activity = 1.0);

/// 0.5 * (1 - sqrt(sinr / (1 + sinr))), evaluated without cancellation.
double ber(double sinr_value);

/// (1 - ber)^(8 * packet_bytes).
double prr(double ber_value, int packet_bytes);

double link_prr(NodeId sender, NodeId receiver, std::span<const double> powers_mw,
                const RadioChannel& channel, int packet_bytes);

/// Outgoing links of one sender with every other node's power frozen.
///
/// Interference at each receiver does not depend on the sender's own power,
/// so the denominators are computed once and the sender's power can be
/// varied cheaply. Results are bit-identical to link_prr() for the same
/// inputs.
class OutgoingLinks {
 public:
  OutgoingLinks(const RadioChannel& channel, std::span<const double> powers_mw, NodeId sender,
                int packet_bytes);

  NodeId sender() const { return sender_; }
  std::size_t size() const { return denominators_.size(); }

  double sinr(NodeId receiver, double own_mw) const;
  double prr(NodeId receiver, double own_mw) const;

  /// Receivers with prr >= epsilon_link at the given own power.
  std::vector<NodeId> neighbors(double own_mw, double epsilon_link) const;
  std::size_t degree(double own_mw, double epsilon_link) const;

 private:
  const GainMatrix* gains_;
  NodeId sender_;
  int packet_bytes_;
  std::vector<double> denominators_;
};

}  // namespace powergame
