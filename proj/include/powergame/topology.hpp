#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "powergame/channel.hpp"
#include "powergame/strategy_profile.hpp"

namespace powergame {

struct Area {
  double width{100.0};
  double height{100.0};

  bool operator==(const Area&) const = default;
};

struct Topology {
  std::vector<Position> positions;
  Area area;
  std::uint64_t seed{0};

  std::size_t size() const { return positions.size(); }
  /// Throws std::invalid_argument on fewer than 2 nodes or positions outside the area.
  void validate() const;
  bool operator==(const Topology&) const = default;
};

/// Uniform i.i.d. placement over the area, deterministic per seed.
Topology random_topology(std::size_t node_count, Area area, std::uint64_t seed);

struct NeighborSet {
  NodeId owner{0};
  std::vector<NodeId> members;
  double epsilon_link{0.01};
};

/// Receivers j != i with link_prr(i, j) >= epsilon_link under the profile.
NeighborSet neighbor_set(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
                         int packet_bytes, double epsilon_link);

/// Degree above which a random geometric graph on N nodes is asymptotically
/// connected: 5.1774 * log_base(N). Natural log by default.
double rgg_degree_threshold(std::size_t node_count, double log_base = std::exp(1.0));

struct SmallWorldParams {
  double delta{0.1};
  int m_nearest{0};
  double shortcut_expectation{0.0};

  /// Degree a node must exceed under the m + Np rule.
  double degree_bound() const { return m_nearest + shortcut_expectation; }
};

SmallWorldParams smallworld_threshold(std::size_t node_count, double delta);

/// Smallest own strategy (to within `tolerance`) at which node i has at least
/// k neighbors, others held at their profile values. std::nullopt when even
/// s_max falls short.
std::optional<double> min_power_for_degree(NodeId i, const StrategyProfile& profile,
                                           const RadioChannel& channel, int packet_bytes,
                                           double epsilon_link, int k, double tolerance = 1e-6);

/// Same search on a precomputed link view; the profile only supplies bounds.
std::optional<double> min_power_for_degree(const OutgoingLinks& links, double s_min, double s_max,
                                           double epsilon_link, int k, double tolerance = 1e-6);

/// Symmetric boolean matrix with zero diagonal.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool operator()(NodeId i, NodeId j) const { return bits_[i * n_ + j] != 0; }
  /// Sets both (i, j) and (j, i). Self-loops are ignored.
  void connect(NodeId i, NodeId j, bool on = true);
  std::size_t degree(NodeId i) const;

 private:
  std::size_t n_;
  std::vector<unsigned char> bits_;
};

/// Edge (i, j) iff both link_prr(i, j) and link_prr(j, i) reach epsilon_link.
AdjacencyMatrix adjacency(const StrategyProfile& profile, const RadioChannel& channel,
                          int packet_bytes, double epsilon_link);

bool is_connected_bfs(const AdjacencyMatrix& adj);

struct SpectralConnectivity {
  bool connected{false};
  double algebraic_connectivity{0.0};  // second-smallest Laplacian eigenvalue
  bool has_isolated_node{false};
};

SpectralConnectivity spectral_connectivity(const AdjacencyMatrix& adj, double tolerance = 1e-8);

inline bool is_connected_spectral(const AdjacencyMatrix& adj, double tolerance = 1e-8) {
  return spectral_connectivity(adj, tolerance).connected;
}

}  // namespace powergame
