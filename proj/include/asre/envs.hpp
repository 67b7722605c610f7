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

#ifndef ASRE_ENVS_HPP_
#define ASRE_ENVS_HPP_

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "asre/mdp.hpp"

namespace asre {

// All builders are pure: same arguments, same tensors, no randomness. Sizes
// are guarded so a typo in a config cannot allocate a gigabyte tensor.
namespace detail {
inline void check_state_count(long long count, const char* env) {
  if (count > 1000000) {
    throw std::invalid_argument(std::string(env) + ": state space exceeds the 1e6 guard");
  }
}
inline int require_int(double x, const char* what) {
  double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw std::invalid_argument(std::string(what) + " must be an integer");
  return static_cast<int>(r);
}
}  // namespace detail

// Shooting-gallery grid: the agent and a cycling target live on a strip of
// `width` cells; the agent can wait, step left or right (clamped at the
// edges), or fire one of `budget` bullets. A fire pays 1 exactly when the
// agent is on the target's cell at the moment of firing. The bullet count is
// part of the state, so the tensor itself knows that a fire with an empty
// magazine does nothing; the execution cap on fire enforces the same limit
// along sampled trajectories.
//
// Actions: 0 wait (the no-op), 1 left, 2 right, 3 fire.
inline int shooter_state_index(int width, int budget, int agent, int target, int bullets) {
  return (agent * width + target) * (budget + 1) + bullets;
}

inline SparseActionMdp build_budgeted_shooter(int width, int budget, int horizon, double discount = 0.95) {
  if (width < 2) throw std::invalid_argument("build_budgeted_shooter: width must be at least 2");
  if (budget < 1) throw std::invalid_argument("build_budgeted_shooter: budget must be at least 1");
  if (horizon < 0) throw std::invalid_argument("build_budgeted_shooter: horizon must be nonnegative");
  long long num_states = static_cast<long long>(width) * width * (budget + 1);
  detail::check_state_count(num_states, "build_budgeted_shooter");

  SparseActionMdp mdp;
  mdp.num_states = static_cast<int>(num_states);
  mdp.num_actions = 4;
  mdp.discount = discount;
  mdp.horizon = horizon;
  mdp.noop_action = 0;
  mdp.budgets = {kUnlimitedBudget, kUnlimitedBudget, kUnlimitedBudget, budget};
  mdp.transition.assign(static_cast<std::size_t>(num_states) * 4 * num_states, 0.0);
  mdp.reward = Matrix(mdp.num_states, 4, 0.0);
  mdp.initial_dist.assign(num_states, 0.0);
  mdp.terminal.assign(num_states, 0);

  auto set_prob = [&](int s, int a, int s2) {
    mdp.transition[(static_cast<std::size_t>(s) * 4 + a) * num_states + s2] = 1.0;
  };

  for (int agent = 0; agent < width; ++agent) {
    for (int target = 0; target < width; ++target) {
      for (int bullets = 0; bullets <= budget; ++bullets) {
        int s = shooter_state_index(width, budget, agent, target, bullets);
        int next_target = (target + 1) % width;
        for (int a = 0; a < 4; ++a) {
          int next_agent = agent;
          int next_bullets = bullets;
          if (a == 1) next_agent = std::max(0, agent - 1);
          if (a == 2) next_agent = std::min(width - 1, agent + 1);
          if (a == 3 && bullets < budget) {
            next_bullets = bullets + 1;
            if (agent == target) mdp.reward(s, a) = 1.0;
          }
          set_prob(s, a, shooter_state_index(width, budget, next_agent, next_target, next_bullets));
        }
      }
    }
  }
  mdp.initial_dist[shooter_state_index(width, budget, 0, width - 1, 0)] = 1.0;
  mdp.validate();
  return mdp;
}

// Single-asset market on a clamped random-walk price. The trader is either
// flat or holding one unit bought at a remembered entry level; the entry
// level rides along in the state so the sell reward is Markov. A buy while
// flat costs the fee and records the entry; a sell while holding pays the
// price move since entry minus the fee. Orders with no effect (buying while
// holding, selling while flat) move nothing and cost nothing, but they still
// count against the shared trade cap because an order was placed.
//
// Actions: 0 buy, 1 sell, 2 hold (the no-op). Position encoding: 0 flat,
// k > 0 means holding with entry level k - 1.
inline int market_state_index(int price_levels, int price, int position) {
  return price * (price_levels + 1) + position;
}

inline SparseActionMdp build_synthetic_market(int price_levels, int trade_budget, double fee, int horizon,
                                              double up_prob = 0.35, double down_prob = 0.35,
                                              double discount = 0.9) {
  if (price_levels < 2) throw std::invalid_argument("build_synthetic_market: need at least two price levels");
  if (trade_budget < 0) throw std::invalid_argument("build_synthetic_market: trade_budget must be nonnegative");
  if (!(fee >= 0.0)) throw std::invalid_argument("build_synthetic_market: fee must be nonnegative");
  if (horizon < 0) throw std::invalid_argument("build_synthetic_market: horizon must be nonnegative");
  if (!(up_prob >= 0.0) || !(down_prob >= 0.0) || up_prob + down_prob > 1.0 + 1e-12) {
    throw std::invalid_argument("build_synthetic_market: invalid price move probabilities");
  }
  long long num_states = static_cast<long long>(price_levels) * (price_levels + 1);
  detail::check_state_count(num_states, "build_synthetic_market");

  SparseActionMdp mdp;
  mdp.num_states = static_cast<int>(num_states);
  mdp.num_actions = 3;
  mdp.discount = discount;
  mdp.horizon = horizon;
  mdp.noop_action = 2;
  mdp.budgets = {trade_budget, trade_budget, kUnlimitedBudget};
  mdp.transition.assign(static_cast<std::size_t>(num_states) * 3 * num_states, 0.0);
  mdp.reward = Matrix(mdp.num_states, 3, 0.0);
  mdp.initial_dist.assign(num_states, 0.0);
  mdp.terminal.assign(num_states, 0);

  auto add_prob = [&](int s, int a, int s2, double p) {
    mdp.transition[(static_cast<std::size_t>(s) * 3 + a) * num_states + s2] += p;
  };

  for (int price = 0; price < price_levels; ++price) {
    // Price moves are clamped at the edges: blocked moves become stays.
    int up = std::min(price_levels - 1, price + 1);
    int down = std::max(0, price - 1);
    double stay_prob = 1.0 - up_prob - down_prob;
    for (int position = 0; position <= price_levels; ++position) {
      int s = market_state_index(price_levels, price, position);
      for (int a = 0; a < 3; ++a) {
        int next_position = position;
        if (a == 0 && position == 0) {
          mdp.reward(s, a) = -fee;
          next_position = price + 1;
        }
        if (a == 1 && position > 0) {
          mdp.reward(s, a) = static_cast<double>(price - (position - 1)) - fee;
          next_position = 0;
        }
        add_prob(s, a, market_state_index(price_levels, up, next_position), up_prob);
        add_prob(s, a, market_state_index(price_levels, down, next_position), down_prob);
        add_prob(s, a, market_state_index(price_levels, price, next_position), stay_prob);
      }
    }
  }
  mdp.initial_dist[market_state_index(price_levels, 0, 0)] = 1.0;
  mdp.validate();
  return mdp;
}

// Corridor of `length` cells with a one-shot trigger. Advancing walks right
// for free; the trigger pays 1 and ends the episode, but only fired from the
// last cell. Fired anywhere else it costs 0.1 and wastes a use. The trigger
// carries the execution cap, so with a cap of zero every request collapses
// to the advance no-op and every policy earns exactly zero.
//
// Actions: 0 advance (the no-op), 1 trigger. State `length` is terminal.
inline SparseActionMdp build_chain_with_trigger(int length, int trigger_budget, int horizon,
                                                double discount = 0.9) {
  if (length < 2) throw std::invalid_argument("build_chain_with_trigger: length must be at least 2");
  if (trigger_budget < 0) throw std::invalid_argument("build_chain_with_trigger: trigger_budget must be nonnegative");
  if (horizon < 0) throw std::invalid_argument("build_chain_with_trigger: horizon must be nonnegative");
  long long num_states = length + 1;
  detail::check_state_count(num_states, "build_chain_with_trigger");

  SparseActionMdp mdp;
  mdp.num_states = static_cast<int>(num_states);
  mdp.num_actions = 2;
  mdp.discount = discount;
  mdp.horizon = horizon;
  mdp.noop_action = 0;
  mdp.budgets = {kUnlimitedBudget, trigger_budget};
  mdp.transition.assign(static_cast<std::size_t>(num_states) * 2 * num_states, 0.0);
  mdp.reward = Matrix(mdp.num_states, 2, 0.0);
  mdp.initial_dist.assign(num_states, 0.0);
  mdp.terminal.assign(num_states, 0);
  mdp.terminal[length] = 1;

  auto set_prob = [&](int s, int a, int s2) {
    mdp.transition[(static_cast<std::size_t>(s) * 2 + a) * num_states + s2] = 1.0;
  };

  for (int cell = 0; cell < length; ++cell) {
    // Advance: one step right, stuck at the last cell.
    set_prob(cell, 0, std::min(length - 1, cell + 1));
    if (cell == length - 1) {
      mdp.reward(cell, 1) = 1.0;
      set_prob(cell, 1, length);
    } else {
      mdp.reward(cell, 1) = -0.1;
      set_prob(cell, 1, cell);
    }
  }
  set_prob(length, 0, length);
  set_prob(length, 1, length);
  mdp.initial_dist[0] = 1.0;
  mdp.validate();
  return mdp;
}

// Named environment plus parameter overrides, the form configs use. Unknown
// names and unknown parameter keys are rejected so typos fail loudly instead
// of silently building a default.
struct EnvSpec {
  std::string name;
  std::map<std::string, double> params;

  static std::map<std::string, double> default_params(const std::string& name) {
    if (name == "chain") {
      return {{"length", 4}, {"trigger_budget", 1}, {"horizon", 12}, {"discount", 0.9}};
    }
    if (name == "shooter") {
      return {{"width", 5}, {"budget", 5}, {"horizon", 50}, {"discount", 0.95}};
    }
    if (name == "market") {
      return {{"price_levels", 5}, {"trade_budget", 30}, {"fee", 0.2},      {"horizon", 60},
              {"up_prob", 0.35},   {"down_prob", 0.35},  {"discount", 0.9}};
    }
    throw std::invalid_argument("EnvSpec: unknown environment '" + name + "'");
  }

  SparseActionMdp build() const {
    std::map<std::string, double> p = default_params(name);
    for (const auto& [key, value] : params) {
      if (p.find(key) == p.end()) {
        throw std::invalid_argument("EnvSpec: unknown parameter '" + key + "' for '" + name + "'");
      }
      p[key] = value;
    }
    if (name == "chain") {
      return build_chain_with_trigger(detail::require_int(p["length"], "length"),
                                      detail::require_int(p["trigger_budget"], "trigger_budget"),
                                      detail::require_int(p["horizon"], "horizon"), p["discount"]);
    }
    if (name == "shooter") {
      return build_budgeted_shooter(detail::require_int(p["width"], "width"),
                                    detail::require_int(p["budget"], "budget"),
                                    detail::require_int(p["horizon"], "horizon"), p["discount"]);
    }
    return build_synthetic_market(detail::require_int(p["price_levels"], "price_levels"),
                                  detail::require_int(p["trade_budget"], "trade_budget"), p["fee"],
                                  detail::require_int(p["horizon"], "horizon"), p["up_prob"],
                                  p["down_prob"], p["discount"]);
  }
};

}  // namespace asre

#endif  // ASRE_ENVS_HPP_
