#include "powergame/topology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>

namespace powergame {

void Topology::validate() const {
  if (positions.size() < 2) {
    throw std::invalid_argument("topology: need at least 2 nodes");
  }
  if (!(area.width > 0.0 && area.height > 0.0)) {
    throw std::invalid_argument("topology: area must be positive");
  }
  for (const auto& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.x > area.width ||
        p.y < 0.0 || p.y > area.height) {
      throw std::invalid_argument("topology: position outside the deployment area");
    }
  }
}

Topology random_topology(std::size_t node_count, Area area, std::uint64_t seed) {
  if (node_count < 2) {
    throw std::invalid_argument("random_topology: need at least 2 nodes");
  }
  if (!(area.width > 0.0 && area.height > 0.0)) {
    throw std::invalid_argument("random_topology: area must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  Topology topo{{}, area, seed};
  topo.positions.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    topo.positions.push_back({x, y});
  }
  return topo;
}

NeighborSet neighbor_set(NodeId i, const StrategyProfile& profile, const RadioChannel& channel,
                         int packet_bytes, double epsilon_link) {
  const auto powers = profile.powers_mw();
  OutgoingLinks links(channel, powers, i, packet_bytes);
  return {i, links.neighbors(powers[i], epsilon_link), epsilon_link};
}

double rgg_degree_threshold(std::size_t node_count, double log_base) {
  if (node_count < 2) {
    throw std::invalid_argument("rgg_degree_threshold: N must be >= 2");
  }
  if (!(log_base > 1.0)) {
    throw std::invalid_argument("rgg_degree_threshold: log base must exceed 1");
  }
  return 5.1774 * std::log(static_cast<double>(node_count)) / std::log(log_base);
}

SmallWorldParams smallworld_threshold(std::size_t node_count, double delta) {
  if (node_count < 2) {
    throw std::invalid_argument("smallworld_threshold: M must be >= 2");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("smallworld_threshold: delta must be positive");
  }
  const double raw = (1.0 + delta) * std::sqrt(2.0 * std::log(static_cast<double>(node_count)));
  return {delta, static_cast<int>(std::ceil(raw)), raw};
}

std::optional<double> min_power_for_degree(const OutgoingLinks& links, double s_min, double s_max,
                                           double epsilon_link, int k, double tolerance) {
  const auto degree_at = [&](double s) {
    return links.degree(strategy_to_mw(s), epsilon_link) >= static_cast<std::size_t>(k);
  };
  if (k <= 0 || degree_at(s_min)) return s_min;
  if (!degree_at(s_max)) return std::nullopt;
  // Own-power degree is monotone: own links never see self-interference.
  double lo = s_min;
  double hi = s_max;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (degree_at(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::optional<double> min_power_for_degree(NodeId i, const StrategyProfile& profile,
                                           const RadioChannel& channel, int packet_bytes,
                                           double epsilon_link, int k, double tolerance) {
  const auto powers = profile.powers_mw();
  OutgoingLinks links(channel, powers, i, packet_bytes);
  return min_power_for_degree(links, profile.s_min(), profile.s_max(), epsilon_link, k, tolerance);
}

void AdjacencyMatrix::connect(NodeId i, NodeId j, bool on) {
  if (i == j) return;
  bits_.at(i * n_ + j) = on ? 1 : 0;
  bits_.at(j * n_ + i) = on ? 1 : 0;
}

std::size_t AdjacencyMatrix::degree(NodeId i) const {
  return static_cast<std::size_t>(
      std::count(bits_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                 bits_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_), 1));
}

AdjacencyMatrix adjacency(const StrategyProfile& profile, const RadioChannel& channel,
                          int packet_bytes, double epsilon_link) {
  const std::size_t n = profile.size();
  const auto powers = profile.powers_mw();
  std::vector<unsigned char> directed(n * n, 0);
  for (NodeId i = 0; i < n; ++i) {
    OutgoingLinks links(channel, powers, i, packet_bytes);
    for (NodeId j = 0; j < n; ++j) {
      if (j != i && links.prr(j, powers[i]) >= epsilon_link) directed[i * n + j] = 1;
    }
  }
  AdjacencyMatrix adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (directed[i * n + j] && directed[j * n + i]) adj.connect(i, j);
    }
  }
  return adj;
}

bool is_connected_bfs(const AdjacencyMatrix& adj) {
  const std::size_t n = adj.size();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::deque<NodeId> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (!seen[v] && adj(u, v)) {
        seen[v] = true;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

SpectralConnectivity spectral_connectivity(const AdjacencyMatrix& adj, double tolerance) {
  const auto n = static_cast<Eigen::Index>(adj.size());
  SpectralConnectivity out;
  if (n <= 1) {
    out.connected = true;
    return out;
  }
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && adj(static_cast<NodeId>(i), static_cast<NodeId>(j))) {
        laplacian(i, j) = -1.0;
        laplacian(i, i) += 1.0;
      }
    }
    if (laplacian(i, i) == 0.0) out.has_isolated_node = true;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_connectivity: eigensolver did not converge");
  }
  // Eigenvalues come back sorted ascending; the smallest is always zero.
  out.algebraic_connectivity = solver.eigenvalues()(1);
  out.connected = !out.has_isolated_node && out.algebraic_connectivity > tolerance;
  return out;
}

}  // namespace powergame
