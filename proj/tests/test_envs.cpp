// Copyright 2026 The ASRE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "asre/envs.hpp"
#include "asre/soft_bellman.hpp"
#include "oracles.hpp"

using asre::EnvSpec;
using asre::SparseActionMdp;

TEST_CASE("chain optimum is walk to the end and trigger once") {
  SparseActionMdp chain = asre::build_chain_with_trigger(4, 1, 12, 0.9);
  REQUIRE(chain.num_states == 5);
  REQUIRE(chain.num_actions == 2);
  REQUIRE(chain.noop_action == 0);
  REQUIRE(chain.is_terminal(4));
  REQUIRE(chain.budgets[1] == 1);

  // Three advances then the trigger: 0.9^3 * 1.
  asre::ValueIterationResult vi = asre::standard_value_iteration(chain);
  REQUIRE(asre::state_values(vi.q)[0] == Catch::Approx(0.729).margin(1e-9));
  REQUIRE(oracles::best_action_sequence_return(chain, 12) == Catch::Approx(0.729).margin(1e-12));

  // Misfiring early costs 0.1 and delays the goal.
  REQUIRE(vi.q(0, 1) == Catch::Approx(-0.1 + 0.9 * 0.729).margin(1e-9));
}

TEST_CASE("a sealed trigger budget turns every request into an advance") {
  SparseActionMdp sealed = asre::build_chain_with_trigger(4, 0, 12, 0.9);
  asre::Rng rng(8);
  for (int e = 0; e < 20; ++e) {
    asre::Trajectory traj =
        asre::run_episode(sealed, [](int) { return std::vector<double>{0.0, 1.0}; }, rng);
    REQUIRE(traj.undiscounted_return() == 0.0);
    for (const asre::Transition& t : traj.transitions) {
      REQUIRE(t.requested_action == 1);
      REQUIRE(t.action == 0);
    }
  }
}

TEST_CASE("shooter dynamic programming agrees with the native rules") {
  SparseActionMdp shooter = asre::build_budgeted_shooter(3, 2, 8, 0.95);
  REQUIRE(shooter.num_states == 3 * 3 * 3);
  REQUIRE(shooter.budgets[3] == 2);
  int start = asre::shooter_state_index(3, 2, 0, 2, 0);
  REQUIRE(shooter.initial_dist[start] == 1.0);

  std::vector<double> dp = oracles::finite_horizon_values(shooter, 8);
  double native = oracles::shooter_rules_best_return(3, 2, 8, 0.95);
  REQUIRE(dp[start] == Catch::Approx(native).margin(1e-12));
  REQUIRE(native > 0.0);
}

TEST_CASE("a budget beyond the horizon never binds") {
  SparseActionMdp tight = asre::build_budgeted_shooter(3, 6, 6, 0.95);
  SparseActionMdp slack = asre::build_budgeted_shooter(3, 12, 6, 0.95);
  int start_tight = asre::shooter_state_index(3, 6, 0, 2, 0);
  int start_slack = asre::shooter_state_index(3, 12, 0, 2, 0);
  double v_tight = oracles::finite_horizon_values(tight, 6)[start_tight];
  double v_slack = oracles::finite_horizon_values(slack, 6)[start_slack];
  REQUIRE(v_tight == Catch::Approx(v_slack).margin(1e-12));
}

TEST_CASE("state count guard rejects oversized grids") {
  REQUIRE_THROWS_AS(asre::build_budgeted_shooter(800, 1, 10, 0.95), std::invalid_argument);
  REQUIRE_THROWS_AS(asre::build_synthetic_market(1001, 1, 0.1, 10), std::invalid_argument);
}

TEST_CASE("rising market rewards one early round trip") {
  // Deterministic upward walk: buy at the bottom, sell at the top.
  SparseActionMdp market = asre::build_synthetic_market(3, 30, 0.1, 12, 1.0, 0.0, 0.9);
  REQUIRE(market.num_states == 3 * 4);
  REQUIRE(market.noop_action == 2);
  int start = asre::market_state_index(3, 0, 0);
  REQUIRE(market.initial_dist[start] == 1.0);

  // Buy now (-0.1), price climbs to 2 in two steps, sell for 1.9:
  // -0.1 + 0.9^2 * 1.9 = 1.439.
  asre::ValueIterationResult vi = asre::standard_value_iteration(market);
  REQUIRE(asre::state_values(vi.q)[start] == Catch::Approx(1.439).margin(1e-9));
  REQUIRE(oracles::best_action_sequence_return(market, 6) == Catch::Approx(1.439).margin(1e-12));
}

TEST_CASE("a prohibitive fee makes holding optimal everywhere") {
  SparseActionMdp market = asre::build_synthetic_market(3, 30, 10.0, 12, 0.35, 0.35, 0.9);
  asre::ValueIterationResult vi = asre::standard_value_iteration(market);
  std::vector<double> v = asre::state_values(vi.q);
  for (double value : v) REQUIRE(value == Catch::Approx(0.0).margin(1e-9));
  // Holding is always a maximizer.
  for (int s = 0; s < market.num_states; ++s) {
    REQUIRE(vi.q(s, 2) == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(vi.q(s, 0) <= vi.q(s, 2) + 1e-9);
    REQUIRE(vi.q(s, 1) <= vi.q(s, 2) + 1e-9);
  }
}

TEST_CASE("per-action trade budgets block extra orders") {
  SparseActionMdp market = asre::build_synthetic_market(3, 1, 0.1, 10, 1.0, 0.0, 0.9);
  asre::Rng rng(4);
  for (int e = 0; e < 10; ++e) {
    asre::Trajectory traj =
        asre::run_episode(market, [](int) { return std::vector<double>{1.0, 0.0, 0.0}; }, rng);
    int executed_buys = 0;
    for (const asre::Transition& t : traj.transitions) {
      if (t.action == 0) ++executed_buys;
      REQUIRE(t.requested_action == 0);
    }
    REQUIRE(executed_buys == 1);
  }
}

TEST_CASE("no-effect orders still consume the order budget") {
  // Budget one sell. Selling while flat does nothing yet spends the order,
  // so a later legitimate sell is refused.
  SparseActionMdp market = asre::build_synthetic_market(3, 1, 0.0, 10, 1.0, 0.0, 0.9);
  asre::BudgetTracker tracker(market);
  asre::Rng rng(6);
  int s = asre::market_state_index(3, 0, 0);
  asre::StepResult wasted = asre::step(market, tracker, s, 1, rng);
  REQUIRE(wasted.executed_action == 1);
  REQUIRE(wasted.reward == 0.0);
  REQUIRE_FALSE(tracker.can_execute(1));
}

TEST_CASE("builders are pure functions of their arguments") {
  SparseActionMdp a = asre::build_budgeted_shooter(4, 3, 20, 0.95);
  SparseActionMdp b = asre::build_budgeted_shooter(4, 3, 20, 0.95);
  REQUIRE(a.transition == b.transition);
  REQUIRE(a.reward == b.reward);
  REQUIRE(a.budgets == b.budgets);
  REQUIRE(a.initial_dist == b.initial_dist);
}

TEST_CASE("env specs build from named parameter maps") {
  EnvSpec spec;
  spec.name = "chain";
  spec.params = EnvSpec::default_params("chain");
  REQUIRE(spec.params.at("length") == 4.0);
  SparseActionMdp chain = spec.build();
  REQUIRE(chain.num_states == 5);

  spec.params["length"] = 6.0;
  REQUIRE(spec.build().num_states == 7);

  EnvSpec bad_name;
  bad_name.name = "cartpole";
  REQUIRE_THROWS_AS(bad_name.build(), std::invalid_argument);
  REQUIRE_THROWS_AS(EnvSpec::default_params("cartpole"), std::invalid_argument);

  EnvSpec bad_key;
  bad_key.name = "chain";
  bad_key.params = EnvSpec::default_params("chain");
  bad_key.params["lengths"] = 4.0;
  REQUIRE_THROWS_AS(bad_key.build(), std::invalid_argument);

  EnvSpec fractional;
  fractional.name = "chain";
  fractional.params = EnvSpec::default_params("chain");
  fractional.params["length"] = 4.5;
  REQUIRE_THROWS_AS(fractional.build(), std::invalid_argument);

  EnvSpec market;
  market.name = "market";
  market.params = EnvSpec::default_params("market");
  SparseActionMdp m = market.build();
  REQUIRE(m.num_states == 5 * 6);
  REQUIRE(m.budgets[0] == 30);

  EnvSpec shooter;
  shooter.name = "shooter";
  shooter.params = EnvSpec::default_params("shooter");
  REQUIRE(shooter.build().num_states == 5 * 5 * 6);
}

TEST_CASE("built instances pass full validation") {
  REQUIRE_NOTHROW(asre::build_chain_with_trigger(4, 1, 12, 0.9).validate());
  REQUIRE_NOTHROW(asre::build_budgeted_shooter(5, 5, 50, 0.95).validate());
  REQUIRE_NOTHROW(asre::build_synthetic_market(5, 30, 0.2, 60, 0.35, 0.35, 0.9).validate());
}
