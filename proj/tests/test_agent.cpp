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

#include "asre/agent.hpp"
#include "asre/envs.hpp"

using asre::AgentConfig;
using asre::ConstraintPrior;
using asre::Matrix;
using asre::QParams;
using asre::ReplayBuffer;
using asre::SparsityDistribution;

TEST_CASE("constraint prior starves the constrained action down to delta") {
  ConstraintPrior prior(4, 2, 0.03125);
  REQUIRE(prior.dist[2] == Catch::Approx(0.03125).epsilon(1e-12));
  REQUIRE(prior.dist[0] == Catch::Approx((1.0 - 0.03125) / 3.0).epsilon(1e-12));
  double total = 0.0;
  for (double p : prior.dist) total += p;
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(prior.constrained_action == 2);

  ConstraintPrior flat = ConstraintPrior::uniform(4);
  for (double p : flat.dist) REQUIRE(p == Catch::Approx(0.25));

  REQUIRE_THROWS_AS(ConstraintPrior(1, 0, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(ConstraintPrior(4, 4, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(ConstraintPrior(4, 0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(ConstraintPrior(4, 0, 0.26), std::invalid_argument);
}

TEST_CASE("behavior policy weights the prior by exponentiated action values") {
  ConstraintPrior prior(3, 1, 0.05);
  std::vector<double> q = {0.2, -0.4, 1.0};

  std::vector<double> pi = asre::behavior_policy(q, prior.dist, 1.0);
  double z = 0.0;
  std::vector<double> expected(3);
  for (int a = 0; a < 3; ++a) {
    expected[a] = prior.dist[a] * std::exp(q[a]);
    z += expected[a];
  }
  for (int a = 0; a < 3; ++a) REQUIRE(pi[a] == Catch::Approx(expected[a] / z).epsilon(1e-10));

  // Dividing by a small temperature sharpens toward the argmax.
  std::vector<double> sharp = asre::behavior_policy(q, prior.dist, 0.05);
  REQUIRE(sharp[2] > 0.99);

  // Extreme spreads must not overflow into NaN.
  std::vector<double> wide = {-400.0, 0.0, 900.0};
  std::vector<double> stable = asre::behavior_policy(wide, prior.dist, 1.0);
  double total = 0.0;
  for (double p : stable) {
    REQUIRE(std::isfinite(p));
    total += p;
  }
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
  REQUIRE(stable[2] == Catch::Approx(1.0).epsilon(1e-9));

  REQUIRE_THROWS_AS(asre::behavior_policy(q, prior.dist, 0.0), std::invalid_argument);
}

TEST_CASE("sparsity distribution is the softmax of negated starvation costs") {
  std::vector<double> means = {0.0, 1.0};
  SparsityDistribution dist = asre::sparsity_from_means(means);
  double z = 1.0 + std::exp(-1.0);
  REQUIRE(dist.probs[0] == Catch::Approx(1.0 / z).epsilon(1e-12));
  REQUIRE(dist.probs[1] == Catch::Approx(std::exp(-1.0) / z).epsilon(1e-12));

  // Higher mean return while starved of an action means the action is
  // dispensable, so it must receive less prior mass.
  REQUIRE(dist.probs[1] < dist.probs[0]);

  // Huge spreads stay finite and normalized.
  std::vector<double> spread = {-800.0, 700.0, 0.0};
  SparsityDistribution extreme = asre::sparsity_from_means(spread);
  double total = 0.0;
  for (double p : extreme.probs) {
    REQUIRE(std::isfinite(p));
    total += p;
  }
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("td target bootstraps through the soft value unless the transition is terminal") {
  QParams target = QParams::tabular(2, 2);
  target.table(1, 0) = 0.4;
  target.table(1, 1) = 0.8;
  SparsityDistribution prior = SparsityDistribution::uniform(2);
  double lambda = 0.5;

  asre::Transition tr;
  tr.state = 0;
  tr.action = 0;
  tr.reward = 0.25;
  tr.next_state = 1;
  tr.done = false;

  std::vector<double> next_row = {0.4, 0.8};
  double soft = asre::soft_value(next_row, prior, lambda);
  double y = asre::td_target(target, tr, prior, lambda, 0.9);
  REQUIRE(y == Catch::Approx(0.25 + 0.9 * soft).epsilon(1e-12));
  REQUIRE(asre::max_td_target(target, tr, 0.9) == Catch::Approx(0.25 + 0.9 * 0.8).epsilon(1e-12));

  tr.done = true;
  REQUIRE(asre::td_target(target, tr, prior, lambda, 0.9) == 0.25);
  REQUIRE(asre::max_td_target(target, tr, 0.9) == 0.25);
}

namespace {

std::vector<asre::Transition> make_batch(const std::vector<int>& states, const std::vector<int>& actions) {
  std::vector<asre::Transition> batch(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    batch[i].state = states[i];
    batch[i].action = actions[i];
  }
  return batch;
}

}  // namespace

TEST_CASE("batch update averages gradients and reports the half mean squared error") {
  QParams params = QParams::tabular(2, 2);
  // Batch: two samples on (0,0) with targets 1 and 0.5, one on (1,1) with -1.
  std::vector<asre::Transition> batch = make_batch({0, 0, 1}, {0, 0, 1});
  std::vector<double> targets = {1.0, 0.5, -1.0};
  double loss = asre::q_update(params, batch, targets, 0.1);

  // All predictions start at zero: errors are -1, -0.5, +1.
  // Accumulated gradient on (0,0) is (-1 - 0.5), on (1,1) is +1; the step is
  // lr * accumulated / m with m = 3.
  REQUIRE(params.table(0, 0) == Catch::Approx(0.1 * 1.5 / 3.0).epsilon(1e-12));
  REQUIRE(params.table(1, 1) == Catch::Approx(-0.1 / 3.0).epsilon(1e-12));
  REQUIRE(params.table(0, 1) == 0.0);
  REQUIRE(loss == Catch::Approx((1.0 + 0.25 + 1.0) / 6.0).epsilon(1e-12));
}

TEST_CASE("linear update follows the finite difference gradient") {
  Matrix phi(3, 2);
  phi(0, 0) = 1.0;
  phi(0, 1) = 0.5;
  phi(1, 0) = -0.3;
  phi(1, 1) = 1.2;
  phi(2, 0) = 0.7;
  phi(2, 1) = -0.9;
  QParams params = QParams::linear(phi, 2);
  asre::Rng rng(13);
  for (int a = 0; a < 2; ++a) {
    for (int f = 0; f < 2; ++f) params.theta(a, f) = rng.uniform01() - 0.5;
  }

  std::vector<asre::Transition> batch = make_batch({0, 2, 1}, {1, 0, 1});
  std::vector<double> targets = {0.3, -0.2, 0.9};

  auto batch_loss = [&](const QParams& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      double err = p.value(batch[i].state, batch[i].action) - targets[i];
      total += err * err;
    }
    return total / (2.0 * batch.size());
  };

  QParams stepped = params;
  const double lr = 0.25;
  asre::q_update(stepped, batch, targets, lr);

  const double eps = 1e-6;
  for (int a = 0; a < 2; ++a) {
    for (int f = 0; f < 2; ++f) {
      QParams plus = params;
      QParams minus = params;
      plus.theta(a, f) += eps;
      minus.theta(a, f) -= eps;
      double grad = (batch_loss(plus) - batch_loss(minus)) / (2.0 * eps);
      double applied = (params.theta(a, f) - stepped.theta(a, f)) / lr;
      REQUIRE(applied == Catch::Approx(grad).margin(1e-6));
    }
  }
}

TEST_CASE("polyak update blends online into target") {
  QParams online = QParams::tabular(1, 2);
  QParams target = QParams::tabular(1, 2);
  online.table(0, 0) = 1.0;
  online.table(0, 1) = -2.0;
  target.table(0, 0) = 0.5;
  asre::polyak_update(online, target, 0.1);
  REQUIRE(target.table(0, 0) == Catch::Approx(0.1 * 1.0 + 0.9 * 0.5).epsilon(1e-12));
  REQUIRE(target.table(0, 1) == Catch::Approx(-0.2).epsilon(1e-12));

  QParams wrong = QParams::tabular(2, 2);
  REQUIRE_THROWS_AS(asre::polyak_update(online, wrong, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(asre::polyak_update(online, target, 0.0), std::invalid_argument);
}

TEST_CASE("replay buffer overwrites oldest entries once full") {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i) {
    asre::Transition t;
    t.reward = static_cast<double>(i);
    buffer.push(t);
  }
  REQUIRE(buffer.size() == 3);
  asre::Rng rng(2);
  std::vector<asre::Transition> batch;
  buffer.sample(64, rng, batch);
  REQUIRE(batch.size() == 64);
  for (const asre::Transition& t : batch) {
    // Entries 0 and 1 were evicted.
    REQUIRE(t.reward >= 2.0);
  }
}

TEST_CASE("agent config validation accepts the delta sentinel and rejects bad values") {
  AgentConfig cfg;
  REQUIRE(cfg.delta == 0.0);
  REQUIRE_NOTHROW(cfg.validate(4));
  cfg.delta = 0.2;
  REQUIRE_NOTHROW(cfg.validate(4));
  cfg.delta = 0.25;
  REQUIRE_THROWS_AS(cfg.validate(4), std::invalid_argument);

  AgentConfig bad;
  bad.lambda = 0.0;
  REQUIRE_THROWS_AS(bad.validate(4), std::invalid_argument);
  AgentConfig bad2;
  bad2.batch_size = 0;
  REQUIRE_THROWS_AS(bad2.validate(4), std::invalid_argument);
  AgentConfig bad3;
  bad3.sparsity_eval_episodes = 0;
  REQUIRE_THROWS_AS(bad3.validate(4), std::invalid_argument);
}

TEST_CASE("training is deterministic for a fixed seed") {
  asre::SparseActionMdp mdp = asre::build_chain_with_trigger(4, 1, 12, 0.9);
  AgentConfig cfg;
  cfg.lambda = 0.05;
  cfg.sparsity_eval_episodes = 5;
  cfg.batch_size = 32;
  cfg.learn_rate = 0.05;
  cfg.polyak = 0.05;
  cfg.buffer_capacity = 2000;

  asre::TrainResult a = asre::train(mdp, cfg, 3000, 42);
  asre::TrainResult b = asre::train(mdp, cfg, 3000, 42);
  REQUIRE(a.params.dense() == b.params.dense());
  REQUIRE(a.ptilde.probs == b.ptilde.probs);
  REQUIRE(a.record.rows.size() == b.record.rows.size());
  for (std::size_t i = 0; i < a.record.rows.size(); ++i) {
    REQUIRE(a.record.rows[i].undiscounted_return == b.record.rows[i].undiscounted_return);
    REQUIRE(a.record.rows[i].executed == b.record.rows[i].executed);
  }

  asre::TrainResult c = asre::train(mdp, cfg, 3000, 43);
  bool identical = a.params.dense() == c.params.dense();
  REQUIRE_FALSE(identical);
}

TEST_CASE("training rows never exceed the action caps") {
  asre::SparseActionMdp mdp = asre::build_budgeted_shooter(3, 2, 20, 0.95);
  AgentConfig cfg;
  cfg.lambda = 0.05;
  cfg.sparsity_eval_episodes = 4;
  cfg.batch_size = 16;
  cfg.learn_rate = 0.05;
  cfg.polyak = 0.05;
  cfg.buffer_capacity = 1000;
  asre::TrainResult res = asre::train(mdp, cfg, 2500, 0);
  REQUIRE_FALSE(res.record.rows.empty());
  for (const auto& row : res.record.rows) {
    REQUIRE(row.executed[3] <= 2);
  }
}

TEST_CASE("the sparsity prior refreshes at round boundaries unless frozen") {
  asre::SparseActionMdp mdp = asre::build_chain_with_trigger(4, 1, 12, 0.9);
  AgentConfig cfg;
  cfg.lambda = 0.05;
  cfg.sparsity_eval_episodes = 3;
  cfg.batch_size = 16;
  cfg.learn_rate = 0.05;
  cfg.polyak = 0.05;
  cfg.buffer_capacity = 1000;

  asre::TrainResult live = asre::train(mdp, cfg, 2500, 1);
  bool moved = false;
  for (double p : live.ptilde.probs) {
    if (std::abs(p - 0.5) > 1e-6) moved = true;
  }
  REQUIRE(moved);
  // Rows before the first full sweep carry the uniform prior.
  REQUIRE(live.record.rows.front().ptilde[0] == Catch::Approx(0.5));

  AgentConfig frozen = cfg;
  frozen.freeze_sparsity_uniform = true;
  asre::TrainResult fixed = asre::train(mdp, frozen, 2500, 1);
  for (const auto& row : fixed.record.rows) {
    REQUIRE(row.ptilde[0] == Catch::Approx(0.5));
    REQUIRE(row.ptilde[1] == Catch::Approx(0.5));
  }
  for (double p : fixed.ptilde.probs) REQUIRE(p == Catch::Approx(0.5));
}

TEST_CASE("checkpoint hooks fire on the configured interval") {
  asre::SparseActionMdp mdp = asre::build_chain_with_trigger(4, 1, 12, 0.9);
  AgentConfig cfg;
  cfg.lambda = 0.05;
  cfg.sparsity_eval_episodes = 3;
  cfg.batch_size = 8;
  cfg.learn_rate = 0.05;
  cfg.buffer_capacity = 500;

  std::vector<long long> seen;
  asre::TrainHooks hooks;
  hooks.checkpoint_interval = 100;
  hooks.on_checkpoint = [&](const asre::TrainCheckpoint& cp) {
    seen.push_back(cp.steps);
    REQUIRE(cp.eval_policy.rows() == 5);
    REQUIRE(cp.eval_policy.cols() == 2);
  };
  asre::train(mdp, cfg, 1000, 3, hooks);
  REQUIRE(seen.size() == 10);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    REQUIRE(seen[i] == 100 * static_cast<long long>(i + 1));
  }
}

TEST_CASE("greedy extraction returns one-hot rows") {
  QParams params = QParams::tabular(2, 3);
  params.table(0, 1) = 2.0;
  params.table(1, 0) = 1.0;
  params.table(1, 2) = 1.0;
  Matrix pi = asre::extract_policy(params, SparsityDistribution::uniform(3), 0.1, true);
  REQUIRE(pi(0, 1) == 1.0);
  REQUIRE(pi(0, 0) == 0.0);
  // Ties break toward the lowest action.
  REQUIRE(pi(1, 0) == 1.0);
  REQUIRE(pi(1, 2) == 0.0);

  Matrix soft = asre::extract_policy(params, SparsityDistribution::uniform(3), 0.5, false);
  double total = soft(0, 0) + soft(0, 1) + soft(0, 2);
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
  REQUIRE(soft(0, 1) > soft(0, 0));
}

TEST_CASE("zero horizon training is rejected when steps were requested") {
  asre::SparseActionMdp mdp = asre::build_chain_with_trigger(4, 1, 12, 0.9);
  mdp.horizon = 0;
  AgentConfig cfg;
  REQUIRE_THROWS_AS(asre::train(mdp, cfg, 100, 0), std::invalid_argument);
  REQUIRE_NOTHROW(asre::train(mdp, cfg, 0, 0));
}
