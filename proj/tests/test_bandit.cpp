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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "asre/bandit.hpp"
#include "asre/random.hpp"

using asre::DUcbConfig;
using asre::DUcbState;

TEST_CASE("config validation") {
  DUcbConfig cfg;
  REQUIRE_NOTHROW(cfg.validate());
  cfg.gamma_tilde = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.gamma_tilde = 1.5;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.gamma_tilde = 1.0;
  cfg.c = -0.1;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(DUcbState(0, DUcbConfig{}), std::invalid_argument);
}

TEST_CASE("unpulled arms carry infinite indexes and are covered first in order") {
  DUcbState bandit(4, DUcbConfig{});
  for (int expected = 0; expected < 4; ++expected) {
    REQUIRE_FALSE(bandit.all_pulled());
    int arm = bandit.select_arm();
    REQUIRE(arm == expected);
    REQUIRE(std::isinf(bandit.index(arm)));
    bandit.update(arm, 0.25 * expected);
  }
  REQUIRE(bandit.all_pulled());
  for (int a = 0; a < 4; ++a) REQUIRE(std::isfinite(bandit.index(a)));
}

TEST_CASE("update decays every arm before crediting the selected one") {
  DUcbConfig cfg;
  cfg.gamma_tilde = 0.9;
  DUcbState bandit(2, cfg);
  bandit.update(0, 1.0);
  bandit.update(1, 2.0);
  bandit.update(0, 0.5);

  // Counts: arm0 = (1*0.9)*0.9 + 1 = 1.81, arm1 = 1*0.9 = 0.9.
  REQUIRE(bandit.discounted_count(0) == Catch::Approx(1.81).epsilon(1e-12));
  REQUIRE(bandit.discounted_count(1) == Catch::Approx(0.9).epsilon(1e-12));
  // Sums: arm0 = (1.0*0.9)*0.9 + 0.5 = 1.31, arm1 = 2.0*0.9 = 1.8.
  REQUIRE(bandit.mean(0) == Catch::Approx(1.31 / 1.81).epsilon(1e-12));
  REQUIRE(bandit.mean(1) == Catch::Approx(1.8 / 0.9).epsilon(1e-12));
  REQUIRE(bandit.total_count() == Catch::Approx(2.71).epsilon(1e-12));
}

TEST_CASE("index formula adds the exploration bonus on the discounted statistics") {
  DUcbConfig cfg;
  cfg.gamma_tilde = 0.9;
  cfg.c = 0.5;
  DUcbState bandit(2, cfg);
  bandit.update(0, 1.0);
  bandit.update(1, 2.0);
  bandit.update(0, 0.5);
  double t = bandit.total_count();
  double expected0 = 1.31 / 1.81 + 0.5 * std::sqrt(std::log(t) / 1.81);
  double expected1 = 1.8 / 0.9 + 0.5 * std::sqrt(std::log(t) / 0.9);
  REQUIRE(bandit.index(0) == Catch::Approx(expected0).epsilon(1e-12));
  REQUIRE(bandit.index(1) == Catch::Approx(expected1).epsilon(1e-12));
}

TEST_CASE("mean access on an unpulled arm throws while means_or substitutes") {
  DUcbState bandit(3, DUcbConfig{});
  bandit.update(1, 0.7);
  REQUIRE_THROWS_AS(bandit.mean(0), std::logic_error);
  std::vector<double> means = bandit.means_or(-1.0);
  REQUIRE(means[0] == -1.0);
  REQUIRE(means[1] == Catch::Approx(0.7));
  REQUIRE(means[2] == -1.0);
  REQUIRE(bandit.pulled(1));
  REQUIRE_FALSE(bandit.pulled(2));
}

TEST_CASE("ties break toward the lowest arm") {
  DUcbConfig cfg;
  cfg.c = 0.0;
  cfg.gamma_tilde = 1.0;
  DUcbState bandit(3, cfg);
  bandit.update(0, 1.0);
  bandit.update(1, 1.0);
  bandit.update(2, 1.0);
  REQUIRE(bandit.select_arm() == 0);
}

TEST_CASE("stationary play concentrates on the best arm") {
  DUcbConfig cfg;
  cfg.gamma_tilde = 0.99;
  cfg.c = 0.5;
  DUcbState bandit(3, cfg);
  asre::Rng rng(9);
  std::vector<double> payoff = {0.2, 0.8, 0.5};
  int best_picks = 0;
  for (int round = 0; round < 300; ++round) {
    int arm = bandit.select_arm();
    double r = rng.uniform01() < payoff[arm] ? 1.0 : 0.0;
    bandit.update(arm, r);
    if (arm == 1) ++best_picks;
  }
  REQUIRE(best_picks >= 250);
}

TEST_CASE("discounting lets the bandit abandon a dead arm quickly after a payoff flip") {
  // Deterministic simulation: arm 0 pays before the flip at round 200, arm 1
  // after. Measure how long each bandit keeps pulling the dead arm.
  struct FlipStats {
    int window_old_picks = 0;  // dead-arm picks in rounds 200..259
    int late_new_picks = 0;    // new-arm picks in rounds 300..399
    int first_switch = -1;     // first post-flip round that tried arm 1
    double final_mean_old = 0.0;
  };
  auto run_flip = [](double gamma_tilde) {
    DUcbConfig cfg;
    cfg.gamma_tilde = gamma_tilde;
    cfg.c = 0.5;
    DUcbState bandit(2, cfg);
    FlipStats stats;
    for (int round = 0; round < 400; ++round) {
      int arm = bandit.select_arm();
      double r = ((round < 200) == (arm == 0)) ? 1.0 : 0.0;
      bandit.update(arm, r);
      if (round >= 200 && round < 260 && arm == 0) ++stats.window_old_picks;
      if (round >= 300 && arm == 1) ++stats.late_new_picks;
      if (round >= 200 && stats.first_switch < 0 && arm == 1) stats.first_switch = round;
    }
    stats.final_mean_old = bandit.mean(0);
    return stats;
  };

  FlipStats discounted = run_flip(0.95);
  FlipStats flat = run_flip(1.0);

  // The discounted statistics forget the dead arm's early run: it leaves the
  // transition window almost immediately and its mean collapses.
  REQUIRE(discounted.window_old_picks <= 20);
  REQUIRE(discounted.first_switch <= 220);
  REQUIRE(discounted.final_mean_old < 0.1);
  REQUIRE(discounted.late_new_picks >= 90);

  // The flat bandit keeps crediting the dead arm through the whole window,
  // and its mean barely moves.
  REQUIRE(flat.window_old_picks >= 40);
  REQUIRE(flat.first_switch >= 250);
  REQUIRE(flat.final_mean_old > 0.5);
  REQUIRE(flat.window_old_picks - discounted.window_old_picks >= 20);
}
