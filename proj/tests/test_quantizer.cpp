#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "powergame/game.hpp"
#include "powergame/quantizer.hpp"
#include "scenarios.hpp"

using namespace powergame;

TEST_SUITE("level sets") {
  TEST_CASE("default grid has 25 one-dB levels ending at zero") {
    const auto l = LevelSet::uniform();
    REQUIRE(l.size() == 25);
    CHECK(l.lowest() == -24.0);
    CHECK(l.highest() == 0.0);
    for (std::size_t k = 1; k < l.size(); ++k) CHECK(l.levels()[k] - l.levels()[k - 1] == 1.0);
    CHECK(LevelSet::uniform(26).lowest() == -25.0);
  }

  TEST_CASE("malformed level sets are rejected") {
    CHECK_THROWS_AS(LevelSet(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet({-3.0, -5.0}), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet({-3.0, -3.0}), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet({-26.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet::uniform(0), std::invalid_argument);
    CHECK_THROWS_AS(LevelSet::uniform(27), std::invalid_argument);
  }

  TEST_CASE("restriction keeps the levels inside the range") {
    const auto r = LevelSet::uniform().restricted(-10.5, -2.0);
    CHECK(r.lowest() == -10.0);
    CHECK(r.highest() == -2.0);
    CHECK(r.size() == 9);
    CHECK_THROWS_AS(LevelSet::uniform().restricted(-0.5, -0.1), std::invalid_argument);
  }
}

TEST_SUITE("quantize") {
  const LevelSet grid = LevelSet::uniform();

  TEST_CASE("nearest level with ties toward lower power") {
    CHECK(quantize(-12.4, grid) == -12.0);
    CHECK(quantize(-12.6, grid) == -13.0);
    CHECK(quantize(-12.5, grid) == -13.0);
    CHECK(quantize(0.0, grid) == 0.0);
    CHECK(quantize(-24.0, grid) == -24.0);
    CHECK(quantize(-1.25, grid) == -1.0);
  }

  TEST_CASE("inputs outside the radio range are clamped") {
    CHECK(quantize(3.0, grid) == 0.0);
    CHECK(quantize(-30.0, grid) == -24.0);
    CHECK(quantize(-24.7, grid) == -24.0);
  }

  TEST_CASE("error bound, idempotence and monotonicity on random samples") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-24.5, 0.0);
    std::vector<double> xs;
    for (int k = 0; k < 10000; ++k) xs.push_back(u(rng));
    std::sort(xs.begin(), xs.end());
    double previous = -1e9;
    for (double x : xs) {
      const double q = quantize(x, grid);
      CHECK(std::abs(q - x) <= 0.5);
      CHECK(quantize(q, grid) == q);
      CHECK(q >= previous);
      previous = q;
    }
  }

  TEST_CASE("non-uniform grids round to the nearest entry") {
    const LevelSet cc = RegisterMap::cc2420().levels();
    CHECK(quantize(-20.0, cc) == -25.0);
    CHECK(quantize(-19.9, cc) == -15.0);
    CHECK(quantize(-8.5, cc) == -10.0);
    CHECK(quantize(-8.4, cc) == -7.0);
  }
}

TEST_SUITE("discretized profiles") {
  TEST_CASE("on-grid profiles are unchanged") {
    const StrategyProfile p({1.0, 5.0, 25.0, 13.0}, 0.5, 25.0);
    CHECK(discretize_profile(p, LevelSet::uniform()) == p);
  }

  TEST_CASE("each node moves by at most half a step") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> s(0.5, 25.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v;
      for (int k = 0; k < 10; ++k) v.push_back(s(rng));
      const StrategyProfile p(v, 0.5, 25.0);
      const auto q = discretize_profile(p, LevelSet::uniform());
      for (NodeId i = 0; i < 10; ++i) {
        CHECK(std::abs(q.dbm(i) - p.dbm(i)) <= 0.5);
        CHECK(q.dbm(i) == quantize(p.dbm(i), LevelSet::uniform()));
      }
    }
  }

  TEST_CASE("levels outside the strategy bounds are not used") {
    const StrategyProfile p({0.5, 0.7}, 0.5, 25.0);
    const auto q = discretize_profile(p, LevelSet::uniform(26));
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 1.0);
  }
}

TEST_SUITE("discrete best response") {
  TEST_CASE("unreachable degree and a lone node both pick the lowest level") {
    const Topology t{{{0, 0}, {1, 0}, {9000, 9000}}, {9000, 9000}, 0};
    const RadioChannel ch{build_gain_matrix(t.positions, {}), {1e-10}, 1.0};
    const auto prof = StrategyProfile::uniform(3, 25.0, 0.5, 25.0);
    CHECK(discrete_best_response(2, prof, ch, {}, LevelSet::uniform()) == -24.0);
    const RadioChannel lone{GainMatrix(1), {1e-10}, 1.0};
    CHECK(discrete_best_response(0, StrategyProfile({9.0}, 0.5, 25.0), lone, {},
                                 LevelSet::uniform()) == -24.0);
  }

  TEST_CASE("matches a brute-force evaluation at every level") {
    const auto d = scenarios::desk(6, 5, 20.0);
    GameParams gp;
    gp.degree_target = 2;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> s(0.5, 25.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v;
      for (int k = 0; k < 5; ++k) v.push_back(s(rng));
      const StrategyProfile prof(v, 0.5, 25.0);
      for (NodeId i = 0; i < 5; ++i) {
        double best_level = 0.0;
        double best_value = -1e300;
        for (int level = -24; level <= 0; ++level) {
          const double value = utility(i, prof.with(i, level + 25.0), d.channel, gp);
          if (value > best_value) {
            best_value = value;
            best_level = level;
          }
        }
        CHECK(discrete_best_response(i, prof, d.channel, gp, LevelSet::uniform()) == best_level);
      }
    }
  }

  TEST_CASE("without interference the grid dynamics reach a fixed point") {
    for (std::uint64_t seed : scenarios::connected_desk_seeds(3)) {
      auto d = scenarios::desk(seed);
      d.channel.interference_activity = 0.0;
      const auto init = StrategyProfile::uniform(10, 25.0, 0.5, 25.0);
      const auto r = solve_discrete(init, d.channel, {}, LevelSet::uniform());
      CHECK(r.converged);
      CHECK(r.cycle_length == 0);
      CHECK(r.sweeps_used <= 100);
      for (NodeId i = 0; i < 10; ++i) {
        CHECK(r.profile.dbm(i) == std::round(r.profile.dbm(i)));
        CHECK(discrete_best_response(i, r.profile, d.channel, {}, LevelSet::uniform()) ==
              r.profile.dbm(i));
      }
    }
  }

  TEST_CASE("with interference the grid dynamics end at a fixed point or a verified cycle") {
    for (std::uint64_t seed : scenarios::connected_desk_seeds(3)) {
      const auto d = scenarios::desk(seed);
      const auto init = StrategyProfile::uniform(10, 25.0, 0.5, 25.0);
      const auto r = solve_discrete(init, d.channel, {}, LevelSet::uniform());
      CHECK(r.sweeps_used <= 100);
      if (r.converged) {
        CHECK(r.cycle_length == 0);
        for (NodeId i = 0; i < 10; ++i) {
          CHECK(discrete_best_response(i, r.profile, d.channel, {}, LevelSet::uniform()) ==
                r.profile.dbm(i));
        }
        continue;
      }
      REQUIRE(r.cycle_length > 0);
      const auto& trace = r.strategy_trace;
      const auto last = trace.size() - 1;
      CHECK(trace[last] == trace[last - r.cycle_length]);
      for (int k = 1; k < r.cycle_length; ++k) CHECK(trace[last] != trace[last - k]);
      StrategyProfile again = r.profile;
      for (NodeId i = 0; i < 10; ++i) {
        again.set(i, discrete_best_response(i, again, d.channel, {}, LevelSet::uniform()) + 25.0);
      }
      CHECK(again.strategies() == trace[last - r.cycle_length + 1]);
    }
  }
}

TEST_SUITE("register maps") {
  TEST_CASE("linear map spans the id range monotonically") {
    const auto m = RegisterMap::linear(LevelSet::uniform());
    CHECK(to_register(0.0, m) == 31);
    CHECK(to_register(-24.0, m) == 3);
    int previous = 0;
    for (const auto& e : m.entries()) {
      CHECK(e.id > previous);
      previous = e.id;
    }
  }

  TEST_CASE("transceiver table endpoints and in-between values") {
    const auto m = RegisterMap::cc2420();
    CHECK(to_register(0.0, m) == 31);
    CHECK(to_register(-25.0, m) == 3);
    CHECK(to_register(-10.0, m) == 11);
    CHECK(to_register(-9.0, m) == 11);
    CHECK(to_register(-6.0, m) == 15);
    int previous = 0;
    const LevelSet levels = m.levels();
    for (double level : levels.levels()) {
      const int id = to_register(level, m);
      CHECK(id > previous);
      previous = id;
    }
  }

  TEST_CASE("levels outside the table are rejected") {
    CHECK_THROWS_AS(to_register(0.5, RegisterMap::cc2420()), std::out_of_range);
    CHECK_THROWS_AS(to_register(-24.5, RegisterMap::linear(LevelSet::uniform())),
                    std::out_of_range);
  }

  TEST_CASE("non-monotone tables are rejected") {
    CHECK_THROWS_AS(RegisterMap({{-10.0, 5}, {-5.0, 4}}), std::invalid_argument);
    CHECK_THROWS_AS(RegisterMap({}), std::invalid_argument);
  }
}
