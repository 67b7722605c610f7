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

#ifndef ASRE_MDP_HPP_
#define ASRE_MDP_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asre/matrix.hpp"
#include "asre/random.hpp"

namespace asre {

inline constexpr long long kUnlimitedBudget = -1;

// Finite MDP with optional per-episode execution caps on individual actions.
// A capped action can be executed at most budgets[a] times per episode; once
// the cap is hit, requesting it executes the designated no-op instead. The
// no-op itself must be uncapped so an episode can always proceed.
//
// Terminal states are absorbing with zero reward in the tensors themselves
// (self-loop probability one), so analytic operators and the simulator agree
// without special-casing.
struct SparseActionMdp {
  int num_states = 0;
  int num_actions = 0;
  // Transition kernel, flattened as [s * A * S + a * S + s'].
  std::vector<double> transition;
  // Expected immediate reward, states by actions.
  Matrix reward;
  double discount = 0.9;
  std::vector<double> initial_dist;
  // Per-episode execution caps; kUnlimitedBudget means no cap. A cap of zero
  // is legal and makes the action unusable.
  std::vector<long long> budgets;
  // Episode length cap; zero means episodes end immediately.
  int horizon = 0;
  int noop_action = 0;
  std::vector<std::uint8_t> terminal;

  double prob(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2];
  }
  std::span<const double> next_dist(int s, int a) const {
    return {transition.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  bool is_budgeted(int a) const { return budgets[a] != kUnlimitedBudget; }
  bool has_budgeted_action() const {
    for (int a = 0; a < num_actions; ++a) {
      if (is_budgeted(a)) return true;
    }
    return false;
  }
  bool is_terminal(int s) const { return terminal[s] != 0; }

  // Checks every structural invariant; throws std::invalid_argument with a
  // description of the first violation found.
  void validate() const;
};

inline void SparseActionMdp::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SparseActionMdp: " + msg); };
  if (num_states < 1) fail("num_states must be at least 1");
  if (num_actions < 1) fail("num_actions must be at least 1");
  std::size_t s_count = num_states, a_count = num_actions;
  if (transition.size() != s_count * a_count * s_count) fail("transition tensor has wrong size");
  if (reward.rows() != num_states || reward.cols() != num_actions) fail("reward matrix has wrong shape");
  if (initial_dist.size() != s_count) fail("initial_dist has wrong size");
  if (budgets.size() != a_count) fail("budgets has wrong size");
  if (terminal.size() != s_count) fail("terminal flags have wrong size");
  if (!(discount >= 0.0) || !(discount < 1.0)) fail("discount must lie in [0, 1)");
  if (horizon < 0) fail("horizon must be nonnegative");
  if (noop_action < 0 || noop_action >= num_actions) fail("noop_action out of range");
  if (budgets[noop_action] != kUnlimitedBudget) fail("no-op action must be uncapped");
  for (int a = 0; a < num_actions; ++a) {
    if (budgets[a] < kUnlimitedBudget) fail("budget must be nonnegative or unlimited");
  }

  const double kTol = 1e-9;
  double d0 = 0.0;
  for (double p : initial_dist) {
    if (p < -kTol) fail("initial_dist has a negative entry");
    d0 += p;
  }
  if (std::abs(d0 - 1.0) > kTol) fail("initial_dist does not sum to 1");

  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      double row_sum = 0.0;
      for (int s2 = 0; s2 < num_states; ++s2) {
        double p = prob(s, a, s2);
        if (p < -kTol) fail("transition probability is negative");
        row_sum += p;
      }
      if (std::abs(row_sum - 1.0) > kTol) fail("transition row does not sum to 1");
    }
    if (is_terminal(s)) {
      for (int a = 0; a < num_actions; ++a) {
        if (reward(s, a) != 0.0) fail("terminal state has nonzero reward");
        if (std::abs(prob(s, a, s) - 1.0) > kTol) fail("terminal state is not absorbing");
      }
    }
  }
}

// Mutable per-episode view of the remaining execution caps.
class BudgetTracker {
 public:
  explicit BudgetTracker(const SparseActionMdp& mdp) { reset(mdp); }

  void reset(const SparseActionMdp& mdp) { remaining_ = mdp.budgets; }

  bool can_execute(int a) const {
    return remaining_[a] == kUnlimitedBudget || remaining_[a] > 0;
  }
  long long remaining(int a) const { return remaining_[a]; }

  void consume(int a) {
    if (remaining_[a] == kUnlimitedBudget) return;
    if (remaining_[a] <= 0) throw std::logic_error("BudgetTracker: consuming an exhausted action");
    --remaining_[a];
  }

 private:
  std::vector<long long> remaining_;
};

// One environment step as stored in trajectories and replay. `action` is what
// actually executed; `requested_action` is what the policy asked for before
// any budget substitution.
struct Transition {
  int state = 0;
  int action = 0;
  int requested_action = 0;
  double reward = 0.0;
  int next_state = 0;
  bool done = false;
  int step_index = 0;
};

struct Trajectory {
  std::vector<Transition> transitions;

  double undiscounted_return() const {
    double total = 0.0;
    for (const Transition& tr : transitions) total += tr.reward;
    return total;
  }
  double discounted_return(double gamma) const {
    double total = 0.0;
    for (const Transition& tr : transitions) {
      total += std::pow(gamma, tr.step_index) * tr.reward;
    }
    return total;
  }
};

struct StepResult {
  double reward = 0.0;
  int next_state = 0;
  int executed_action = 0;
};

// Executes one transition under the budget rule: a capped-out request is
// replaced by the no-op before dynamics and reward apply.
inline StepResult step(const SparseActionMdp& mdp, BudgetTracker& tracker, int s, int a, Rng& rng) {
  if (s < 0 || s >= mdp.num_states) throw std::out_of_range("step: state out of range");
  if (a < 0 || a >= mdp.num_actions) throw std::out_of_range("step: action out of range");
  int executed = tracker.can_execute(a) ? a : mdp.noop_action;
  tracker.consume(executed);
  double r = mdp.reward(s, executed);
  int s2 = rng.sample_discrete(mdp.next_dist(s, executed));
  return {r, s2, executed};
}

// Policy as a map from state to an action distribution.
using PolicyFn = std::function<std::vector<double>(int)>;

inline PolicyFn make_policy(const Matrix& policy) {
  return [&policy](int s) {
    auto r = policy.row(s);
    return std::vector<double>(r.begin(), r.end());
  };
}

// Rolls one episode: samples the start state, then steps under the policy
// until the horizon or a terminal state. Budgets reset at the start.
inline Trajectory run_episode(const SparseActionMdp& mdp, const PolicyFn& policy, Rng& rng) {
  Trajectory traj;
  BudgetTracker tracker(mdp);
  int s = rng.sample_discrete(mdp.initial_dist);
  for (int t = 0; t < mdp.horizon; ++t) {
    std::vector<double> probs = policy(s);
    if (static_cast<int>(probs.size()) != mdp.num_actions) {
      throw std::invalid_argument("run_episode: policy returned wrong-sized distribution");
    }
    int requested = rng.sample_discrete(probs);
    StepResult res = step(mdp, tracker, s, requested, rng);
    bool done = mdp.is_terminal(res.next_state);
    traj.transitions.push_back({s, res.executed_action, requested, res.reward, res.next_state, done, t});
    if (done) break;
    s = res.next_state;
  }
  return traj;
}

namespace detail {

// Solves A x = b by Gaussian elimination with partial pivoting. A is consumed.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n) {
    throw std::invalid_argument("solve_linear: shape mismatch");
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

inline void check_stochastic_rows(const Matrix& policy, int num_actions, const char* who) {
  const double kTol = 1e-9;
  if (policy.cols() != num_actions) {
    throw std::invalid_argument(std::string(who) + ": policy has wrong number of actions");
  }
  for (int s = 0; s < policy.rows(); ++s) {
    double sum = 0.0;
    for (int a = 0; a < num_actions; ++a) {
      if (policy(s, a) < -kTol) {
        throw std::invalid_argument(std::string(who) + ": policy has a negative entry");
      }
      sum += policy(s, a);
    }
    if (std::abs(sum - 1.0) > kTol) {
      throw std::invalid_argument(std::string(who) + ": policy row does not sum to 1");
    }
  }
}

}  // namespace detail

// Infinite-horizon discounted value of a stationary stochastic policy,
// ignoring budgets: V = r_pi + gamma * P_pi * V. Solved directly when the
// instance is small, by fixed-point iteration otherwise.
inline std::vector<double> exact_policy_evaluation(const SparseActionMdp& mdp, const Matrix& policy) {
  detail::check_stochastic_rows(policy, mdp.num_actions, "exact_policy_evaluation");
  if (policy.rows() != mdp.num_states) {
    throw std::invalid_argument("exact_policy_evaluation: policy has wrong number of states");
  }
  int n = mdp.num_states;
  std::vector<double> r_pi(n, 0.0);
  Matrix p_pi(n, n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double w = policy(s, a);
      if (w == 0.0) continue;
      r_pi[s] += w * mdp.reward(s, a);
      auto next = mdp.next_dist(s, a);
      for (int s2 = 0; s2 < n; ++s2) p_pi(s, s2) += w * next[s2];
    }
  }
  if (static_cast<long long>(n) * mdp.num_actions <= 10000) {
    Matrix system(n, n, 0.0);
    for (int s = 0; s < n; ++s) {
      for (int s2 = 0; s2 < n; ++s2) system(s, s2) = (s == s2 ? 1.0 : 0.0) - mdp.discount * p_pi(s, s2);
    }
    return detail::solve_linear(std::move(system), r_pi);
  }
  std::vector<double> v(n, 0.0), next_v(n, 0.0);
  for (long long iter = 0; iter < 10000000; ++iter) {
    double diff = 0.0;
    for (int s = 0; s < n; ++s) {
      double acc = r_pi[s];
      for (int s2 = 0; s2 < n; ++s2) acc += mdp.discount * p_pi(s, s2) * v[s2];
      next_v[s] = acc;
      diff = std::max(diff, std::abs(acc - v[s]));
    }
    v.swap(next_v);
    if (diff <= 1e-12) return v;
  }
  throw std::runtime_error("exact_policy_evaluation: iteration did not converge");
}

}  // namespace asre

#endif  // ASRE_MDP_HPP_
