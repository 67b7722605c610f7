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

#ifndef ASRE_AGENT_HPP_
#define ASRE_AGENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "asre/bandit.hpp"
#include "asre/matrix.hpp"
#include "asre/mdp.hpp"
#include "asre/random.hpp"
#include "asre/run_record.hpp"
#include "asre/soft_bellman.hpp"

namespace asre {

// Behavior-time action prior that pins one action's probability to a small
// delta and spreads the rest uniformly. Sampling under it starves the
// constrained action, which is how a round measures that action's sparsity.
struct ConstraintPrior {
  std::vector<double> dist;
  int constrained_action = -1;
  double delta = 0.0;

  ConstraintPrior(int num_actions, int constrained, double delta_value) {
    if (num_actions < 2) throw std::invalid_argument("ConstraintPrior: need at least two actions");
    if (constrained < 0 || constrained >= num_actions) {
      throw std::invalid_argument("ConstraintPrior: constrained action out of range");
    }
    if (!(delta_value > 0.0) || !(delta_value < 1.0 / num_actions)) {
      throw std::invalid_argument("ConstraintPrior: delta must lie in (0, 1/num_actions)");
    }
    constrained_action = constrained;
    delta = delta_value;
    dist.assign(num_actions, (1.0 - delta_value) / (num_actions - 1));
    dist[constrained] = delta_value;
  }

  // No constraint: every action weighted equally.
  static ConstraintPrior uniform(int num_actions) {
    ConstraintPrior p;
    p.dist.assign(num_actions, 1.0 / num_actions);
    return p;
  }

 private:
  ConstraintPrior() = default;
};

// Fixed-size ring buffer of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(long long capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  void push(const Transition& tr) {
    if (static_cast<long long>(data_.size()) < capacity_) {
      data_.push_back(tr);
    } else {
      data_[static_cast<std::size_t>(next_)] = tr;
    }
    next_ = (next_ + 1) % capacity_;
  }

  long long size() const { return static_cast<long long>(data_.size()); }

  // Uniform with replacement; `out` is reused to avoid per-call allocation.
  void sample(int count, Rng& rng, std::vector<Transition>& out) const {
    if (data_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
    out.clear();
    for (int i = 0; i < count; ++i) {
      out.push_back(data_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(data_.size())))]);
    }
  }

 private:
  long long capacity_;
  long long next_ = 0;
  std::vector<Transition> data_;
};

enum class QRepr { kTabular, kLinearFeatures };

// Q-function parameters under either a direct table or a linear map on fixed
// state features. With one-hot features the two coincide, which is what the
// gradient tests exploit.
struct QParams {
  QRepr repr = QRepr::kTabular;
  Matrix table;  // states x actions
  Matrix theta;  // actions x features
  Matrix phi;    // states x features, fixed

  static QParams tabular(int num_states, int num_actions) {
    QParams p;
    p.repr = QRepr::kTabular;
    p.table = Matrix(num_states, num_actions, 0.0);
    return p;
  }

  static QParams linear(Matrix features, int num_actions) {
    QParams p;
    p.repr = QRepr::kLinearFeatures;
    p.theta = Matrix(num_actions, features.cols(), 0.0);
    p.phi = std::move(features);
    return p;
  }

  static Matrix one_hot_features(int num_states) {
    Matrix f(num_states, num_states, 0.0);
    for (int s = 0; s < num_states; ++s) f(s, s) = 1.0;
    return f;
  }

  int num_states() const { return repr == QRepr::kTabular ? table.rows() : phi.rows(); }
  int num_actions() const { return repr == QRepr::kTabular ? table.cols() : theta.rows(); }

  double value(int s, int a) const {
    if (repr == QRepr::kTabular) return table(s, a);
    double acc = 0.0;
    for (int f = 0; f < phi.cols(); ++f) acc += theta(a, f) * phi(s, f);
    return acc;
  }

  void values_at(int s, std::span<double> out) const {
    for (int a = 0; a < num_actions(); ++a) out[a] = value(s, a);
  }

  Matrix dense() const {
    Matrix q(num_states(), num_actions());
    for (int s = 0; s < num_states(); ++s) {
      for (int a = 0; a < num_actions(); ++a) q(s, a) = value(s, a);
    }
    return q;
  }
};

struct AgentConfig {
  double lambda = 0.01;
  // Episodes per bandit round: one arm is held constrained for this many
  // episodes before its payoff is recorded.
  int sparsity_eval_episodes = 30;
  int batch_size = 256;
  double learn_rate = 0.001;
  double polyak = 0.005;
  // Probability floor for the constrained action; zero means the default of
  // 1 / (8 * num_actions).
  double delta = 0.0;
  DUcbConfig bandit;
  QRepr q_representation = QRepr::kTabular;
  // Custom features for the linear representation; one-hot when absent.
  std::optional<Matrix> features;
  long long buffer_capacity = 400000;
  // The behavior softmax uses temperature 1 on Q by default; this switches it
  // to temperature lambda, matching the policy-extraction temperature.
  bool behavior_lambda_temperature = false;
  // Bandit payoff options: mean undiscounted episode return by default.
  bool bandit_reward_discounted = false;
  bool bandit_reward_normalized = false;
  // At a horizon cut the last transition still bootstraps unless disabled.
  bool bootstrap_on_truncation = true;
  // Pins ptilde to uniform and stops bandit-driven refreshes.
  bool freeze_sparsity_uniform = false;
  // Drops the delta constraint from the behavior prior. Sparsity evaluation
  // is meaningless without the constraint, so this implies a frozen ptilde.
  bool disable_constraint = false;
  // Replaces the soft backup with the hard max and evaluates greedily; the
  // sparsity machinery keeps running but no longer shapes the learner.
  bool disable_regularization = false;
  // Evaluate with the argmax policy instead of sampling the soft policy.
  bool greedy_eval = false;

  void validate(int num_actions) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("AgentConfig: lambda must be positive");
    if (sparsity_eval_episodes < 1) throw std::invalid_argument("AgentConfig: sparsity_eval_episodes must be positive");
    if (batch_size < 1) throw std::invalid_argument("AgentConfig: batch_size must be positive");
    if (!(learn_rate > 0.0)) throw std::invalid_argument("AgentConfig: learn_rate must be positive");
    if (!(polyak > 0.0) || polyak > 1.0) throw std::invalid_argument("AgentConfig: polyak must lie in (0, 1]");
    if (delta != 0.0 && (!(delta > 0.0) || !(delta < 1.0 / num_actions))) {
      throw std::invalid_argument("AgentConfig: delta must lie in (0, 1/num_actions)");
    }
    if (buffer_capacity < batch_size) throw std::invalid_argument("AgentConfig: buffer smaller than batch");
    bandit.validate();
  }
};

// Softmax over log prior(a) + Q(s, a) / temperature, max-subtracted. This is
// the sampling distribution during training; the prior carries the sparsity
// constraint and the Q term keeps the rollout on-policy enough to learn from.
inline std::vector<double> behavior_policy(std::span<const double> q_row, std::span<const double> prior,
                                           double temperature) {
  if (q_row.size() != prior.size()) throw std::invalid_argument("behavior_policy: size mismatch");
  if (!(temperature > 0.0)) throw std::invalid_argument("behavior_policy: temperature must be positive");
  std::vector<double> logits(q_row.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    logits[a] = std::log(prior[a]) + q_row[a] / temperature;
    m = std::max(m, logits[a]);
  }
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

// Sparsity distribution from bandit means: softmax of the negated means, so
// actions whose constrained rounds still paid well (sparse actions) get the
// most mass. Max-subtracted like every other softmax here.
inline SparsityDistribution sparsity_from_means(std::span<const double> mu) {
  if (mu.empty()) throw std::invalid_argument("sparsity_from_means: empty means");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : mu) m = std::max(m, -x);
  SparsityDistribution p;
  p.probs.resize(mu.size());
  double sum = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    p.probs[a] = std::exp(-mu[a] - m);
    sum += p.probs[a];
  }
  for (double& x : p.probs) x /= sum;
  return p;
}

// Soft one-step target: r + gamma * soft_value of the target network at the
// next state, zero bootstrap on terminal transitions.
inline double td_target(const QParams& target, const Transition& tr, const SparsityDistribution& prior,
                        double lambda, double gamma) {
  if (tr.done) return tr.reward;
  std::vector<double> row(target.num_actions());
  target.values_at(tr.next_state, row);
  return tr.reward + gamma * soft_value(row, prior, lambda);
}

// Hard-max variant used when regularization is disabled.
inline double max_td_target(const QParams& target, const Transition& tr, double gamma) {
  if (tr.done) return tr.reward;
  double m = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < target.num_actions(); ++a) m = std::max(m, target.value(tr.next_state, a));
  return tr.reward + gamma * m;
}

// One batch step on the squared TD error J = 1/(2m) sum (Q(s_i,a_i) - y_i)^2.
// Errors are computed against the parameters as they were at entry, then the
// full gradient is applied at once. Returns J for monitoring.
inline double q_update(QParams& params, std::span<const Transition> batch, std::span<const double> targets,
                       double learn_rate) {
  if (batch.size() != targets.size()) throw std::invalid_argument("q_update: batch/target size mismatch");
  if (batch.empty()) throw std::invalid_argument("q_update: empty batch");
  double m = static_cast<double>(batch.size());
  double loss = 0.0;
  if (params.repr == QRepr::kTabular) {
    Matrix grad(params.table.rows(), params.table.cols(), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      double err = params.value(batch[i].state, batch[i].action) - targets[i];
      loss += err * err;
      grad(batch[i].state, batch[i].action) += err;
    }
    for (std::size_t k = 0; k < grad.data().size(); ++k) {
      params.table.data()[k] -= learn_rate * grad.data()[k] / m;
    }
  } else {
    Matrix grad(params.theta.rows(), params.theta.cols(), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      double err = params.value(batch[i].state, batch[i].action) - targets[i];
      loss += err * err;
      for (int f = 0; f < params.phi.cols(); ++f) {
        grad(batch[i].action, f) += err * params.phi(batch[i].state, f);
      }
    }
    for (std::size_t k = 0; k < grad.data().size(); ++k) {
      params.theta.data()[k] -= learn_rate * grad.data()[k] / m;
    }
  }
  return loss / (2.0 * m);
}

// target <- eta * online + (1 - eta) * target, elementwise on the parameters.
inline void polyak_update(const QParams& online, QParams& target, double eta) {
  if (online.repr != target.repr) throw std::invalid_argument("polyak_update: representation mismatch");
  if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("polyak_update: eta must lie in (0, 1]");
  Matrix& dst = target.repr == QRepr::kTabular ? target.table : target.theta;
  const Matrix& src = online.repr == QRepr::kTabular ? online.table : online.theta;
  if (dst.rows() != src.rows() || dst.cols() != src.cols()) {
    throw std::invalid_argument("polyak_update: shape mismatch");
  }
  for (std::size_t k = 0; k < dst.data().size(); ++k) {
    dst.data()[k] = eta * src.data()[k] + (1.0 - eta) * dst.data()[k];
  }
}

// The deployable policy for the current parameters: the closed-form soft
// policy by default, or the one-hot argmax policy in greedy mode (ties to
// the lowest action index).
inline Matrix extract_policy(const QParams& params, const SparsityDistribution& ptilde, double lambda,
                             bool greedy) {
  Matrix q = params.dense();
  if (!greedy) return extract_regularized_policy(q, ptilde, lambda);
  Matrix pi(q.rows(), q.cols(), 0.0);
  for (int s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (int a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    pi(s, best) = 1.0;
  }
  return pi;
}

// Snapshot passed to the checkpoint hook: cumulative steps and the policy
// the agent would deploy right now. Greedy policies come out as one-hot
// rows, so callers can always just sample rows.
struct TrainCheckpoint {
  long long steps = 0;
  Matrix eval_policy;
};

struct TrainHooks {
  long long checkpoint_interval = 0;  // zero disables checkpoints
  std::function<void(const TrainCheckpoint&)> on_checkpoint;
};

struct TrainResult {
  QParams params;
  SparsityDistribution ptilde;
  RunRecord record;
  Matrix final_policy;
};

// Full training loop. Rounds of sparsity_eval_episodes episodes: the bandit
// picks an action to constrain, episodes roll out under the constrained
// behavior softmax, every environment step does one replay batch update plus
// a Polyak target blend, and at the round boundary the bandit ingests the
// round's mean return and ptilde refreshes once every arm has data.
//
// ptilde only changes at round boundaries, so all targets inside a round use
// one fixed distribution. Budget caps are enforced by the simulator during
// training rollouts exactly as at evaluation time.
inline TrainResult train(const SparseActionMdp& mdp, const AgentConfig& config, long long total_steps,
                         std::uint64_t seed, const TrainHooks& hooks = {}) {
  mdp.validate();
  config.validate(mdp.num_actions);
  if (total_steps < 0) throw std::invalid_argument("train: total_steps must be nonnegative");
  if (mdp.horizon == 0 && total_steps > 0) throw std::invalid_argument("train: zero-horizon instance cannot generate steps");

  const int num_actions = mdp.num_actions;
  const bool bandit_active = !config.freeze_sparsity_uniform && !config.disable_constraint;
  const double delta = config.delta > 0.0 ? config.delta : 1.0 / (8.0 * num_actions);
  const double behavior_temp = config.behavior_lambda_temperature ? config.lambda : 1.0;

  Rng rng(seed);
  QParams online = config.q_representation == QRepr::kTabular
                       ? QParams::tabular(mdp.num_states, num_actions)
                       : QParams::linear(config.features ? *config.features
                                                         : QParams::one_hot_features(mdp.num_states),
                                         num_actions);
  if (online.num_states() != mdp.num_states) throw std::invalid_argument("train: features have wrong row count");
  QParams target = online;

  ReplayBuffer buffer(config.buffer_capacity);
  DUcbState bandit(num_actions, config.bandit);
  SparsityDistribution ptilde = SparsityDistribution::uniform(num_actions);

  RunRecord record;
  record.num_actions = num_actions;

  // Running extremes of raw round payoffs, for optional normalization.
  double payoff_min = std::numeric_limits<double>::infinity();
  double payoff_max = -std::numeric_limits<double>::infinity();

  std::vector<Transition> batch;
  std::vector<double> targets;
  std::vector<double> q_row(num_actions);

  auto eval_policy_now = [&]() {
    return extract_policy(online, ptilde, config.lambda,
                          config.disable_regularization || config.greedy_eval);
  };

  long long steps_done = 0;
  long long episode = 0;
  while (steps_done < total_steps) {
    int arm = bandit_active ? bandit.select_arm() : -1;
    ConstraintPrior prior = config.disable_constraint || !bandit_active
                                ? ConstraintPrior::uniform(num_actions)
                                : ConstraintPrior(num_actions, arm, delta);
    std::vector<double> round_returns;
    std::vector<double> round_disc_returns;

    for (int ep = 0; ep < config.sparsity_eval_episodes && steps_done < total_steps; ++ep) {
      BudgetTracker tracker(mdp);
      int s = rng.sample_discrete(mdp.initial_dist);
      std::vector<long long> requested_counts(num_actions, 0);
      std::vector<long long> executed_counts(num_actions, 0);
      double ep_return = 0.0;
      double ep_disc_return = 0.0;
      bool completed = false;

      for (int t = 0; t < mdp.horizon; ++t) {
        online.values_at(s, q_row);
        std::vector<double> probs = behavior_policy(q_row, prior.dist, behavior_temp);
        int requested = rng.sample_discrete(probs);
        StepResult res = step(mdp, tracker, s, requested, rng);
        bool env_done = mdp.is_terminal(res.next_state);
        bool truncated = t == mdp.horizon - 1;
        bool stored_done = env_done || (truncated && !config.bootstrap_on_truncation);
        buffer.push({s, res.executed_action, requested, res.reward, res.next_state, stored_done, t});

        ++requested_counts[requested];
        ++executed_counts[res.executed_action];
        ep_return += res.reward;
        ep_disc_return += std::pow(mdp.discount, t) * res.reward;
        ++steps_done;

        if (buffer.size() >= config.batch_size) {
          buffer.sample(config.batch_size, rng, batch);
          targets.resize(batch.size());
          for (std::size_t i = 0; i < batch.size(); ++i) {
            targets[i] = config.disable_regularization
                             ? max_td_target(target, batch[i], mdp.discount)
                             : td_target(target, batch[i], ptilde, config.lambda, mdp.discount);
          }
          q_update(online, batch, targets, config.learn_rate);
          polyak_update(online, target, config.polyak);
        }

        if (hooks.on_checkpoint && hooks.checkpoint_interval > 0 &&
            steps_done % hooks.checkpoint_interval == 0) {
          hooks.on_checkpoint({steps_done, eval_policy_now()});
        }

        if (env_done || truncated) {
          completed = true;
          break;
        }
        s = res.next_state;
        if (steps_done >= total_steps) break;
      }

      // A row is written per finished episode; a run cut off mid-episode by
      // the step budget leaves no partial row behind.
      if (completed) {
        record.rows.push_back({episode, steps_done, ep_return, std::move(requested_counts),
                               std::move(executed_counts), ptilde.probs, bandit.means_or(0.0), 0});
        round_returns.push_back(ep_return);
        round_disc_returns.push_back(ep_disc_return);
        ++episode;
      }
    }

    if (bandit_active && static_cast<int>(round_returns.size()) == config.sparsity_eval_episodes) {
      const std::vector<double>& src = config.bandit_reward_discounted ? round_disc_returns : round_returns;
      double payoff = 0.0;
      for (double r : src) payoff += r;
      payoff /= static_cast<double>(src.size());
      if (config.bandit_reward_normalized) {
        payoff_min = std::min(payoff_min, payoff);
        payoff_max = std::max(payoff_max, payoff);
        payoff = payoff_max > payoff_min ? (payoff - payoff_min) / (payoff_max - payoff_min) : 0.5;
      }
      bandit.update(arm, payoff);
      if (bandit.all_pulled()) ptilde = sparsity_from_means(bandit.means_or(0.0));
    }
  }

  TrainResult result;
  result.final_policy = eval_policy_now();
  result.params = std::move(online);
  result.ptilde = std::move(ptilde);
  result.record = std::move(record);
  return result;
}

}  // namespace asre

#endif  // ASRE_AGENT_HPP_
