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

// Test-only reference implementations. Each one computes a quantity the
// library also computes, by a deliberately different route: rollouts instead
// of linear algebra, exhaustive enumeration instead of fixed points, native
// rule simulation instead of tensor lookups.

#ifndef ASRE_TESTS_ORACLES_HPP_
#define ASRE_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "asre/matrix.hpp"
#include "asre/mdp.hpp"

namespace oracles {

// Monte Carlo estimate of the discounted return of a policy from the
// instance's own initial distribution. Returns (mean, standard error).
inline std::pair<double, double> mc_policy_value(const asre::SparseActionMdp& mdp,
                                                 const asre::Matrix& policy, int episodes,
                                                 std::uint64_t seed) {
  asre::Rng rng(seed);
  asre::PolicyFn fn = asre::make_policy(policy);
  double mean = 0.0, m2 = 0.0;
  for (int ep = 1; ep <= episodes; ++ep) {
    double x = asre::run_episode(mdp, fn, rng).discounted_return(mdp.discount);
    double delta = x - mean;
    mean += delta / ep;
    m2 += delta * (x - mean);
  }
  double variance = episodes > 1 ? m2 / (episodes - 1) : 0.0;
  return {mean, std::sqrt(variance / episodes)};
}

// Exhaustive optimum over all deterministic stationary policies, which for a
// discounted MDP attains the optimal values. Exponential in the state count,
// so only for desk-sized instances.
inline std::vector<double> enumerate_optimal_values(const asre::SparseActionMdp& mdp) {
  long long combos = 1;
  for (int s = 0; s < mdp.num_states; ++s) {
    combos *= mdp.num_actions;
    if (combos > 100000) throw std::invalid_argument("enumerate_optimal_values: instance too large");
  }
  std::vector<double> best(mdp.num_states, -std::numeric_limits<double>::infinity());
  for (long long combo = 0; combo < combos; ++combo) {
    asre::Matrix policy(mdp.num_states, mdp.num_actions, 0.0);
    long long rest = combo;
    for (int s = 0; s < mdp.num_states; ++s) {
      policy(s, static_cast<int>(rest % mdp.num_actions)) = 1.0;
      rest /= mdp.num_actions;
    }
    std::vector<double> v = asre::exact_policy_evaluation(mdp, policy);
    for (int s = 0; s < mdp.num_states; ++s) best[s] = std::max(best[s], v[s]);
  }
  return best;
}

namespace detail {
inline int deterministic_next(const asre::SparseActionMdp& mdp, int s, int a) {
  auto row = mdp.next_dist(s, a);
  for (int s2 = 0; s2 < mdp.num_states; ++s2) {
    if (row[s2] > 0.999999999) return s2;
  }
  throw std::invalid_argument("deterministic_next: transition row is not deterministic");
}
}  // namespace detail

// Best discounted return over every open-loop action sequence of the given
// length, honoring execution caps and terminal states. Requires point-mass
// initial state and deterministic transitions.
inline double best_action_sequence_return(const asre::SparseActionMdp& mdp, int steps) {
  int start = -1;
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.initial_dist[s] > 0.999999999) start = s;
  }
  if (start < 0) throw std::invalid_argument("best_action_sequence_return: need a point-mass start");

  std::function<double(int, const asre::BudgetTracker&, int)> rec =
      [&](int s, const asre::BudgetTracker& tracker, int depth) -> double {
    if (depth == steps || mdp.is_terminal(s)) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions; ++a) {
      int executed = tracker.can_execute(a) ? a : mdp.noop_action;
      asre::BudgetTracker next_tracker = tracker;
      next_tracker.consume(executed);
      int s2 = detail::deterministic_next(mdp, s, executed);
      best = std::max(best, mdp.reward(s, executed) + mdp.discount * rec(s2, next_tracker, depth + 1));
    }
    return best;
  };
  asre::BudgetTracker tracker(mdp);
  return rec(start, tracker, 0);
}

// Finite-horizon optimal value of every state by backward induction on the
// tensors, ignoring execution caps (any cap must already live in the state).
inline std::vector<double> finite_horizon_values(const asre::SparseActionMdp& mdp, int steps) {
  std::vector<double> v(mdp.num_states, 0.0);
  for (int k = 0; k < steps; ++k) {
    std::vector<double> next(mdp.num_states, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.is_terminal(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        auto row = mdp.next_dist(s, a);
        double acc = mdp.reward(s, a);
        for (int s2 = 0; s2 < mdp.num_states; ++s2) acc += mdp.discount * row[s2] * v[s2];
        best = std::max(best, acc);
      }
      next[s] = best;
    }
    v = std::move(next);
  }
  return v;
}

// The shooting-gallery optimum computed straight from the rules: positions
// and bullet count as plain integers, no tensors, no state indexing. The cap
// mirrors trajectory semantics: a fire request with nothing left executes
// the wait.
inline double shooter_rules_best_return(int width, int budget, int horizon, double discount) {
  std::function<double(int, int, int, int)> rec = [&](int agent, int target, int bullets,
                                                      int depth) -> double {
    if (depth == horizon) return 0.0;
    int next_target = (target + 1) % width;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < 4; ++a) {
      int act = (a == 3 && bullets >= budget) ? 0 : a;
      int next_agent = agent;
      int next_bullets = bullets;
      double reward = 0.0;
      if (act == 1) next_agent = std::max(0, agent - 1);
      if (act == 2) next_agent = std::min(width - 1, agent + 1);
      if (act == 3) {
        next_bullets = bullets + 1;
        if (agent == target) reward = 1.0;
      }
      best = std::max(best, reward + discount * rec(next_agent, next_target, next_bullets, depth + 1));
    }
    return best;
  };
  return rec(0, width - 1, 0, 0);
}

}  // namespace oracles

#endif  // ASRE_TESTS_ORACLES_HPP_
