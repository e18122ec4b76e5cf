#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "powergame/game.hpp"
#include "powergame/topology.hpp"
#include "scenarios.hpp"

using namespace powergame;

namespace {

// Gain that puts a single link at exactly the requested PRR for the given
// transmit strategy, with no interferers.
double gain_for_prr(double target_prr, double s, double n0) {
  const double b = 1.0 - std::pow(target_prr, 1.0 / 200.0);
  const double r = 1.0 - 2.0 * b;
  const double sinr_value = r * r / (1.0 - r * r);
  return sinr_value * n0 / strategy_to_mw(s);
}

RadioChannel single_node_channel() { return {GainMatrix(1), {1e-10}, 1.0}; }

StrategyProfile random_profile(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> s(0.5, 25.0);
  std::vector<double> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(s(rng));
  return StrategyProfile(v, 0.5, 25.0);
}

double utility_oracle(NodeId i, const StrategyProfile& prof, const RadioChannel& ch,
                      const GameParams& gp) {
  const auto p = prof.powers_mw();
  std::vector<double> member_prr;
  for (NodeId j = 0; j < prof.size(); ++j) {
    if (j == i) continue;
    const double l = static_cast<double>(oracle::prr(
        oracle::ber(oracle::sinr(i, j, p, [&] {
          std::vector<std::vector<double>> h(prof.size(), std::vector<double>(prof.size()));
          for (NodeId a = 0; a < prof.size(); ++a) {
            for (NodeId b = 0; b < prof.size(); ++b) h[a][b] = ch.gains(a, b);
          }
          return h;
        }(), ch.noise.mw, ch.interference_activity)),
        gp.packet_bytes));
    if (l >= gp.epsilon_link) member_prr.push_back(l);
  }
  const double cost = (prof[i] / 25.0) * (prof[i] / 25.0);
  if (static_cast<int>(member_prr.size()) < gp.degree_target) return -cost;
  double sum = 0.0;
  for (double l : member_prr) sum += l;
  return std::log10(1.0 + 9.0 * sum / static_cast<double>(member_prr.size())) - cost;
}

}  // namespace

TEST_SUITE("reliability and utility") {
  TEST_CASE("empty neighborhood gives zero reliability") {
    const Topology t{{{0, 0}, {5000, 0}}, {5000, 10}, 0};
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-10}, 1.0};
    const auto prof = StrategyProfile::uniform(2, 25.0, 0.5, 25.0);
    CHECK(ncr(0, prof, ch, {}) == 0.0);
  }

  TEST_CASE("perfect links give full reliability") {
    const auto t = random_topology(4, {1, 1}, 1);
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-30}, 0.0};
    const auto prof = StrategyProfile::uniform(4, 25.0, 0.5, 25.0);
    CHECK(ncr(0, prof, ch, {}) == 1.0);
  }

  TEST_CASE("reliability is the mean over the neighbor links") {
    GainMatrix g(3);
    g.set(0, 1, gain_for_prr(0.8, 25.0, 1e-10));
    g.set(0, 2, gain_for_prr(0.6, 25.0, 1e-10));
    const RadioChannel ch{g, {1e-10}, 0.0};
    const auto prof = StrategyProfile::uniform(3, 25.0, 0.5, 25.0);
    CHECK(ncr(0, prof, ch, {}) == doctest::Approx(0.7).epsilon(1e-9));
  }

  TEST_CASE("union denominator stays a probability") {
    const auto d = scenarios::desk(4);
    GameParams gp;
    gp.ncr_denominator = NcrDenominator::neighbor_union;
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto prof = random_profile(rng, 10);
      for (NodeId i = 0; i < 10; ++i) {
        const double v = ncr(i, prof, d.channel, gp);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  TEST_CASE("utility at a half-reliable link and half power") {
    GainMatrix g(2);
    g.set(0, 1, gain_for_prr(0.5, 12.5, 1e-10));
    g.set(1, 0, 1e-12);
    const RadioChannel ch{g, {1e-10}, 0.0};
    GameParams gp;
    gp.degree_target = 1;
    const StrategyProfile prof({12.5, 12.5}, 0.5, 25.0);
    CHECK(ncr(0, prof, ch, gp) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(utility(0, prof, ch, gp) == doctest::Approx(std::log10(5.5) - 0.25).epsilon(1e-9));
    CHECK(utility(0, prof, ch, gp) == doctest::Approx(0.49036).epsilon(1e-5));
  }

  TEST_CASE("utility branches at the extremes") {
    const auto t = random_topology(4, {0.5, 0.5}, 1);
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-20}, 0.0};
    GameParams gp;
    gp.degree_target = 3;
    const auto prof = StrategyProfile::uniform(4, 1e-9, 1e-9, 25.0);
    CHECK(utility(0, prof, ch, gp) == doctest::Approx(1.0).epsilon(1e-9));
    gp.degree_target = 10;
    const auto full = StrategyProfile::uniform(4, 25.0, 0.5, 25.0);
    CHECK(utility(0, full, ch, gp) == -1.0);
  }

  TEST_CASE("utility and reliability stay in range and match an independent evaluation") {
    std::mt19937_64 rng(12);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto d = scenarios::desk(seed);
      for (int trial = 0; trial < 10; ++trial) {
        const auto prof = random_profile(rng, 10);
        for (NodeId i = 0; i < 10; ++i) {
          const double u = utility(i, prof, d.channel, {});
          CHECK(u >= -1.0);
          CHECK(u <= 1.0);
          const double r = ncr(i, prof, d.channel, {});
          CHECK(r >= 0.0);
          CHECK(r <= 1.0);
          CHECK(u == doctest::Approx(utility_oracle(i, prof, d.channel, {})).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("small-world rule needs more than m plus Np neighbors") {
    GameParams gp;
    gp.degree_rule = DegreeRule::smallworld;
    const auto sw = smallworld_threshold(80, 0.1);
    CHECK(required_degree(gp, 80) == static_cast<int>(std::floor(sw.degree_bound())) + 1);
    CHECK(required_degree(gp, 80) == 8);
    CHECK(required_degree(GameParams{}, 80) == 6);
  }

  TEST_CASE("parameter validation") {
    GameParams gp;
    gp.log_base = 1.0;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
    gp = {};
    gp.br_tol = 0.0;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
    gp = {};
    gp.prescan_samples = 1;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
    gp = {};
    gp.epsilon_link = 0.0;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
  }
}

TEST_SUITE("potential") {
  TEST_CASE("a single node's potential is its utility") {
    const auto ch = single_node_channel();
    const StrategyProfile prof({7.0}, 0.5, 25.0);
    CHECK(potential(prof, ch, {}) == utility(0, prof, ch, {}));
    CHECK(exact_potential_residual(prof, 0, 3.0, ch, {}) == 0.0);
  }

  TEST_CASE("everyone infeasible at full power sums to minus the node count") {
    const auto t = random_topology(5, {5000, 5000}, 2);
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-10}, 1.0};
    const auto prof = StrategyProfile::uniform(5, 25.0, 0.5, 25.0);
    CHECK(potential(prof, ch, {}) == -5.0);
  }

  TEST_CASE("potential is the per-node sum") {
    const auto d = scenarios::desk(2, 5, 20.0);
    std::mt19937_64 rng(3);
    const auto prof = random_profile(rng, 5);
    GameParams gp;
    gp.degree_target = 2;
    double sum = 0.0;
    for (NodeId i = 0; i < 5; ++i) sum += utility_oracle(i, prof, d.channel, gp);
    CHECK(potential(prof, d.channel, gp) == doctest::Approx(sum).epsilon(1e-10));
  }

  TEST_CASE("a non-move has zero residual") {
    const auto d = scenarios::desk(2);
    std::mt19937_64 rng(4);
    const auto prof = random_profile(rng, 10);
    for (NodeId i = 0; i < 10; ++i) {
      CHECK(exact_potential_residual(prof, i, prof[i], d.channel, {}) == 0.0);
    }
  }

  TEST_CASE("without interference the potential identity is exact") {
    auto d = scenarios::desk(2);
    d.channel.interference_activity = 0.0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> s(0.5, 25.0);
    std::uniform_int_distribution<NodeId> node(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
      const auto prof = random_profile(rng, 10);
      CHECK(exact_potential_residual(prof, node(rng), s(rng), d.channel, {}) <= 1e-9);
    }
  }

  TEST_CASE("with interference the residual is the other nodes' utility change") {
    const auto d = scenarios::desk(2);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> s(0.5, 25.0);
    std::uniform_int_distribution<NodeId> node(0, 9);
    for (int trial = 0; trial < 50; ++trial) {
      const auto prof = random_profile(rng, 10);
      const NodeId i = node(rng);
      const double sp = s(rng);
      const auto moved = prof.with(i, sp);
      double others = 0.0;
      for (NodeId m = 0; m < 10; ++m) {
        if (m != i) others += utility(m, moved, d.channel, {}) - utility(m, prof, d.channel, {});
      }
      CHECK(exact_potential_residual(prof, i, sp, d.channel, {}) ==
            doctest::Approx(std::abs(others)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_SUITE("best response") {
  TEST_CASE("an unreachable degree target plays the minimum") {
    const Topology t{{{0, 0}, {1, 0}, {9000, 9000}}, {9000, 9000}, 0};
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-10}, 1.0};
    const auto prof = StrategyProfile::uniform(3, 25.0, 0.5, 25.0);
    const auto br = best_response_detail(2, prof, ch, {});
    CHECK(br.strategy == 0.5);
    CHECK_FALSE(br.degree_feasible);
  }

  TEST_CASE("a single node plays the minimum") {
    const StrategyProfile prof({20.0}, 0.5, 25.0);
    CHECK(best_response(0, prof, single_node_channel(), {}) == 0.5);
  }

  TEST_CASE("two nodes: agrees with a fine grid search") {
    const Topology t{{{0, 0}, {18, 0}}, {20, 20}, 0};
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-10}, 1.0};
    GameParams gp;
    gp.degree_target = 1;
    for (double partner : {0.5, 10.0, 25.0}) {
      const StrategyProfile prof({25.0, partner}, 0.5, 25.0);
      const NodeUtility u(0, prof, ch, gp);
      const double want = oracle::grid_argmax([&](double s) { return u(s); }, 0.5, 25.0, 1e-4);
      const double got = best_response(0, prof, ch, gp);
      CHECK(std::abs(got - want) <= 1e-3);
    }
  }

  TEST_CASE("desk scenarios: no grid point beats the best response") {
    std::mt19937_64 rng(8);
    for (std::uint64_t seed : scenarios::connected_desk_seeds(3)) {
      const auto d = scenarios::desk(seed);
      const auto prof = random_profile(rng, 10);
      for (NodeId i = 0; i < 10; ++i) {
        const NodeUtility u(i, prof, d.channel, {});
        const auto br = best_response_detail(i, prof, d.channel, {});
        CHECK(br.utility == u(br.strategy));
        double grid_best = -2.0;
        for (double s = 0.5; s <= 25.0; s += 0.01) grid_best = std::max(grid_best, u(s));
        CHECK(br.utility >= grid_best - 1e-4);
      }
    }
  }

  TEST_CASE("the maximizer never lands below a better pre-scan sample") {
    std::mt19937_64 rng(10);
    const GameParams gp;
    for (std::uint64_t seed : scenarios::connected_desk_seeds(3)) {
      const auto d = scenarios::desk(seed);
      const auto prof = random_profile(rng, 10);
      for (NodeId i = 0; i < 10; ++i) {
        const NodeUtility u(i, prof, d.channel, gp);
        const auto br = best_response_detail(i, prof, d.channel, gp);
        const auto lo = min_power_for_degree(u.links(), 0.5, 25.0, gp.epsilon_link, 6, gp.br_tol);
        if (!lo) continue;
        for (int k = 0; k < gp.prescan_samples; ++k) {
          const double x = *lo + (25.0 - *lo) * k / (gp.prescan_samples - 1);
          CHECK(br.utility >= u(x));
        }
      }
    }
  }
}

TEST_SUITE("dynamics") {
  TEST_CASE("a sweep replays sequential best responses") {
    const auto d = scenarios::desk(5, 5, 20.0);
    std::mt19937_64 rng(11);
    const auto prof = random_profile(rng, 5);
    GameParams gp;
    gp.degree_target = 2;
    for (UpdateOrder order : {UpdateOrder::ascending, UpdateOrder::descending}) {
      gp.update_order = order;
      auto replay = prof;
      for (NodeId i : update_sequence(5, order)) replay.set(i, best_response(i, replay, d.channel, gp));
      CHECK(gauss_seidel_sweep(prof, d.channel, gp) == replay);
    }
  }

  TEST_CASE("the observer sees one update per node in order") {
    const auto d = scenarios::desk(5, 5, 20.0);
    const auto prof = StrategyProfile::uniform(5, 25.0, 0.5, 25.0);
    std::vector<NodeId> seen;
    gauss_seidel_sweep(prof, d.channel, {}, [&](NodeId i, const StrategyProfile& before,
                                                const StrategyProfile& after) {
      seen.push_back(i);
      for (NodeId m = 0; m < 5; ++m) {
        if (m != i) CHECK(before[m] == after[m]);
      }
    });
    CHECK(seen == update_sequence(5, UpdateOrder::ascending));
  }

  TEST_CASE("a single node converges in one sweep to the minimum") {
    const StrategyProfile prof({25.0}, 0.5, 25.0);
    const auto r = solve(prof, single_node_channel(), {});
    CHECK(r.converged);
    CHECK(r.sweeps_used == 1);
    CHECK(r.profile[0] == 0.5);
    CHECK(r.potential_trace.size() == 2);
  }

  TEST_CASE("a converged profile is a fixed point") {
    const auto seeds = scenarios::connected_desk_seeds(1);
    const auto d = scenarios::desk(seeds.front());
    const auto first = solve(StrategyProfile::uniform(10, 25.0, 0.5, 25.0), d.channel, {});
    REQUIRE(first.converged);
    const auto again = solve(first.profile, d.channel, {});
    CHECK(again.converged);
    CHECK(again.sweeps_used == 1);
    const auto swept = gauss_seidel_sweep(first.profile, d.channel, {});
    for (NodeId i = 0; i < 10; ++i) CHECK(std::abs(swept[i] - first.profile[i]) <= 1e-4);
  }

  TEST_CASE("traces start at the initial profile and hold one entry per sweep") {
    const auto d = scenarios::desk(3);
    const auto init = StrategyProfile::uniform(10, 25.0, 0.5, 25.0);
    const auto r = solve(init, d.channel, {});
    CHECK(r.strategy_trace.front() == init.strategies());
    CHECK(r.potential_trace.front() == potential(init, d.channel, {}));
    CHECK(r.potential_trace.size() == static_cast<std::size_t>(r.sweeps_used) + 1);
    CHECK(r.strategy_trace.back() == r.profile.strategies());
    CHECK(r.feasible == degree_feasibility(r.profile, d.channel, {}));
  }

  TEST_CASE("sweep cap is respected") {
    const auto d = scenarios::desk(3);
    GameParams gp;
    gp.max_sweeps = 1;
    gp.convergence_tol = 1e-300;
    const auto r = solve(StrategyProfile::uniform(10, 25.0, 0.5, 25.0), d.channel, gp);
    CHECK(r.sweeps_used == 1);
  }

  TEST_CASE("mismatched sizes are rejected") {
    const auto d = scenarios::desk(3);
    CHECK_THROWS_AS(solve(StrategyProfile::uniform(4, 25.0, 0.5, 25.0), d.channel, {}),
                    std::invalid_argument);
  }
}

TEST_SUITE("equilibrium certification") {
  TEST_CASE("solver output passes the deviation grid") {
    for (std::uint64_t seed : scenarios::connected_desk_seeds(3)) {
      const auto d = scenarios::desk(seed);
      const auto r = solve(StrategyProfile::uniform(10, 25.0, 0.5, 25.0), d.channel, {});
      if (!r.converged) continue;
      const auto check = verify_equilibrium(r.profile, d.channel, {}, 1e-4, 0.05);
      CHECK_MESSAGE(check.is_equilibrium, "seed ", seed, " worst gain ", check.worst_gain);
    }
  }

  TEST_CASE("a perturbed coordinate is caught") {
    const auto seeds = scenarios::connected_desk_seeds(3);
    int caught = 0;
    for (std::uint64_t seed : seeds) {
      const auto d = scenarios::desk(seed);
      const auto r = solve(StrategyProfile::uniform(10, 25.0, 0.5, 25.0), d.channel, {});
      for (NodeId i = 0; i < 10; ++i) {
        const double bumped = r.profile[i] + 5.0;
        if (bumped > 25.0) continue;
        const auto check = verify_equilibrium(r.profile.with(i, bumped), d.channel, {}, 1e-4, 0.05);
        CHECK_FALSE(check.is_equilibrium);
        ++caught;
      }
    }
    CHECK(caught > 0);
  }

  TEST_CASE("a lone node at the minimum is an equilibrium") {
    const StrategyProfile prof({0.5}, 0.5, 25.0);
    CHECK(verify_equilibrium(prof, single_node_channel(), {}, 1e-4, 0.05).is_equilibrium);
  }

  TEST_CASE("grid step must be positive") {
    const StrategyProfile prof({0.5}, 0.5, 25.0);
    CHECK_THROWS_AS(verify_equilibrium(prof, single_node_channel(), {}, 1e-4, 0.0),
                    std::invalid_argument);
  }
}
