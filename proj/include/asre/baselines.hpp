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

#ifndef ASRE_BASELINES_HPP_
#define ASRE_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "asre/agent.hpp"
#include "asre/mdp.hpp"
#include "asre/random.hpp"

namespace asre {

// Linear epsilon decay from start to end over decay_steps, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  long long decay_steps = 0;  // zero means a tenth of the step budget

  double at(long long step, long long total_steps) const {
    long long span = decay_steps > 0 ? decay_steps : std::max<long long>(1, total_steps / 10);
    double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(span));
    return start + (end - start) * frac;
  }

  void validate() const {
    if (!(start >= 0.0) || start > 1.0 || !(end >= 0.0) || end > 1.0) {
      throw std::invalid_argument("EpsilonSchedule: start and end must lie in [0, 1]");
    }
    if (decay_steps < 0) throw std::invalid_argument("EpsilonSchedule: decay_steps must be nonnegative");
  }
};

struct BaselineConfig {
  EpsilonSchedule epsilon;
  // Entropy temperature for the soft-backup baseline.
  double entropy_coef = 0.05;
  // Reward penalty per use of a designated sparse action.
  double penalty = 0.1;
  int batch_size = 256;
  double learn_rate = 0.001;
  double polyak = 0.005;
  long long buffer_capacity = 400000;
  QRepr q_representation = QRepr::kTabular;
  bool bootstrap_on_truncation = true;
  // Optional warm start for the tabular representation.
  std::optional<Matrix> initial_q;

  void validate() const {
    epsilon.validate();
    if (!(entropy_coef > 0.0)) throw std::invalid_argument("BaselineConfig: entropy_coef must be positive");
    if (!(penalty >= 0.0)) throw std::invalid_argument("BaselineConfig: penalty must be nonnegative");
    if (batch_size < 1) throw std::invalid_argument("BaselineConfig: batch_size must be positive");
    if (!(learn_rate > 0.0)) throw std::invalid_argument("BaselineConfig: learn_rate must be positive");
    if (!(polyak > 0.0) || polyak > 1.0) throw std::invalid_argument("BaselineConfig: polyak must lie in (0, 1]");
    if (buffer_capacity < batch_size) throw std::invalid_argument("BaselineConfig: buffer smaller than batch");
  }
};

namespace detail {

// Shared epsilon-greedy Q-learning loop. `shaped_penalty` is subtracted from
// the reward stored in replay whenever the executed action is in
// `penalized_actions`; run records always carry the unshaped return so the
// comparison metric stays the environment's own.
inline TrainResult egreedy_core(const SparseActionMdp& mdp, const BaselineConfig& config,
                                const std::vector<int>& penalized_actions, double shaped_penalty,
                                long long total_steps, std::uint64_t seed, const TrainHooks& hooks) {
  mdp.validate();
  config.validate();
  if (total_steps < 0) throw std::invalid_argument("egreedy_core: total_steps must be nonnegative");
  if (mdp.horizon == 0 && total_steps > 0) {
    throw std::invalid_argument("egreedy_core: zero-horizon instance cannot generate steps");
  }
  std::vector<bool> penalized(mdp.num_actions, false);
  for (int a : penalized_actions) {
    if (a < 0 || a >= mdp.num_actions) throw std::invalid_argument("egreedy_core: penalized action out of range");
    penalized[a] = true;
  }

  const int num_actions = mdp.num_actions;
  Rng rng(seed);
  QParams online = config.q_representation == QRepr::kTabular
                       ? QParams::tabular(mdp.num_states, num_actions)
                       : QParams::linear(QParams::one_hot_features(mdp.num_states), num_actions);
  if (config.initial_q) {
    if (config.q_representation != QRepr::kTabular) {
      throw std::invalid_argument("egreedy_core: initial_q requires the tabular representation");
    }
    if (config.initial_q->rows() != mdp.num_states || config.initial_q->cols() != num_actions) {
      throw std::invalid_argument("egreedy_core: initial_q has wrong shape");
    }
    online.table = *config.initial_q;
  }
  QParams target = online;
  ReplayBuffer buffer(config.buffer_capacity);

  RunRecord record;
  record.num_actions = num_actions;
  SparsityDistribution uniform = SparsityDistribution::uniform(num_actions);

  std::vector<Transition> batch;
  std::vector<double> targets;
  std::vector<double> q_row(num_actions);
  std::vector<double> probs(num_actions);

  auto greedy_now = [&]() { return extract_policy(online, uniform, 1.0, /*greedy=*/true); };

  long long steps_done = 0;
  long long episode = 0;
  while (steps_done < total_steps) {
    BudgetTracker tracker(mdp);
    int s = rng.sample_discrete(mdp.initial_dist);
    std::vector<long long> requested_counts(num_actions, 0);
    std::vector<long long> executed_counts(num_actions, 0);
    double ep_return = 0.0;
    bool completed = false;

    for (int t = 0; t < mdp.horizon; ++t) {
      double eps = config.epsilon.at(steps_done, total_steps);
      online.values_at(s, q_row);
      int best = 0;
      for (int a = 1; a < num_actions; ++a) {
        if (q_row[a] > q_row[best]) best = a;
      }
      for (int a = 0; a < num_actions; ++a) probs[a] = eps / num_actions;
      probs[best] += 1.0 - eps;
      int requested = rng.sample_discrete(probs);

      StepResult res = step(mdp, tracker, s, requested, rng);
      bool env_done = mdp.is_terminal(res.next_state);
      bool truncated = t == mdp.horizon - 1;
      bool stored_done = env_done || (truncated && !config.bootstrap_on_truncation);
      double stored_reward = res.reward - (penalized[res.executed_action] ? shaped_penalty : 0.0);
      buffer.push({s, res.executed_action, requested, stored_reward, res.next_state, stored_done, t});

      ++requested_counts[requested];
      ++executed_counts[res.executed_action];
      ep_return += res.reward;
      ++steps_done;

      if (buffer.size() >= config.batch_size) {
        buffer.sample(config.batch_size, rng, batch);
        targets.resize(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
          targets[i] = max_td_target(target, batch[i], mdp.discount);
        }
        q_update(online, batch, targets, config.learn_rate);
        polyak_update(online, target, config.polyak);
      }

      if (hooks.on_checkpoint && hooks.checkpoint_interval > 0 &&
          steps_done % hooks.checkpoint_interval == 0) {
        hooks.on_checkpoint({steps_done, greedy_now()});
      }

      if (env_done || truncated) {
        completed = true;
        break;
      }
      s = res.next_state;
      if (steps_done >= total_steps) break;
    }

    if (completed) {
      record.rows.push_back({episode, steps_done, ep_return, std::move(requested_counts),
                             std::move(executed_counts), uniform.probs,
                             std::vector<double>(num_actions, 0.0), 0});
      ++episode;
    }
  }

  TrainResult result;
  result.final_policy = greedy_now();
  result.params = std::move(online);
  result.ptilde = uniform;
  result.record = std::move(record);
  return result;
}

}  // namespace detail

// Plain epsilon-greedy Q-learning with replay and a Polyak target.
inline TrainResult egreedy_q_train(const SparseActionMdp& mdp, const BaselineConfig& config,
                                   long long total_steps, std::uint64_t seed, const TrainHooks& hooks = {}) {
  return detail::egreedy_core(mdp, config, {}, 0.0, total_steps, seed, hooks);
}

// Epsilon-greedy Q-learning that is told which actions are scarce up front
// and learns on rewards shaped by a flat per-use penalty on them.
inline TrainResult prior_penalty_train(const SparseActionMdp& mdp, const BaselineConfig& config,
                                       const std::vector<int>& sparse_actions, long long total_steps,
                                       std::uint64_t seed, const TrainHooks& hooks = {}) {
  if (sparse_actions.empty()) throw std::invalid_argument("prior_penalty_train: empty sparse action set");
  return detail::egreedy_core(mdp, config, sparse_actions, config.penalty, total_steps, seed, hooks);
}

// Entropy-regularized Q-learning: the same learner as the full agent but with
// the sparsity machinery off, a uniform reference distribution, and the
// entropy coefficient as temperature both in behavior and in the backup.
inline TrainResult softq_train(const SparseActionMdp& mdp, const BaselineConfig& config,
                               long long total_steps, std::uint64_t seed, const TrainHooks& hooks = {}) {
  config.validate();
  AgentConfig agent_config;
  agent_config.lambda = config.entropy_coef;
  agent_config.batch_size = config.batch_size;
  agent_config.learn_rate = config.learn_rate;
  agent_config.polyak = config.polyak;
  agent_config.buffer_capacity = config.buffer_capacity;
  agent_config.q_representation = config.q_representation;
  agent_config.bootstrap_on_truncation = config.bootstrap_on_truncation;
  agent_config.freeze_sparsity_uniform = true;
  agent_config.disable_constraint = true;
  agent_config.behavior_lambda_temperature = true;
  return train(mdp, agent_config, total_steps, seed, hooks);
}

}  // namespace asre

#endif  // ASRE_BASELINES_HPP_
