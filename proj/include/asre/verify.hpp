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

#ifndef ASRE_VERIFY_HPP_
#define ASRE_VERIFY_HPP_

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "asre/agent.hpp"
#include "asre/bandit.hpp"
#include "asre/baselines.hpp"
#include "asre/envs.hpp"
#include "asre/harness.hpp"
#include "asre/mdp.hpp"
#include "asre/random.hpp"
#include "asre/soft_bellman.hpp"

// End-to-end verification: twelve numbered checks covering operator algebra,
// solver agreement against independent oracles, bandit tracking, learning
// sanity, benchmark comparisons, determinism, and budget safety. Every
// tolerance, margin, and operating point is pinned here, next to the check it
// guards.
namespace asre::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// Random instances for the operator properties: irreducible-ish dense rows,
// rewards in [-1, 1], no caps, no terminal states.
inline SparseActionMdp random_mdp(Rng& rng, int num_states, int num_actions, double discount) {
  SparseActionMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.discount = discount;
  mdp.horizon = 10;
  mdp.noop_action = 0;
  mdp.budgets.assign(num_actions, kUnlimitedBudget);
  mdp.terminal.assign(num_states, 0);
  mdp.reward = Matrix(num_states, num_actions);
  mdp.transition.assign(static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      mdp.reward(s, a) = 2.0 * rng.uniform01() - 1.0;
      double total = 0.0;
      std::vector<double> row(num_states);
      for (int s2 = 0; s2 < num_states; ++s2) {
        row[s2] = 0.05 + rng.uniform01();
        total += row[s2];
      }
      for (int s2 = 0; s2 < num_states; ++s2) {
        mdp.transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2] = row[s2] / total;
      }
    }
  }
  mdp.initial_dist.assign(num_states, 1.0 / num_states);
  mdp.validate();
  return mdp;
}

// Explicit small instance from flat reward and transition tables, for
// hand-built oracle cases. rewards is indexed s * A + a; transitions is
// indexed (s * A + a) * S + s2 and every row must already sum to one.
inline SparseActionMdp make_explicit_mdp(int num_states, int num_actions, double discount,
                                         const std::vector<double>& rewards,
                                         const std::vector<double>& transitions) {
  SparseActionMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.discount = discount;
  mdp.horizon = 10;
  mdp.noop_action = 0;
  mdp.budgets.assign(num_actions, kUnlimitedBudget);
  mdp.terminal.assign(num_states, 0);
  mdp.initial_dist.assign(num_states, 1.0 / num_states);
  mdp.reward = Matrix(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) mdp.reward(s, a) = rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
  mdp.transition = transitions;
  mdp.validate();
  return mdp;
}

inline QFunction random_q(Rng& rng, int num_states, int num_actions, double scale) {
  QFunction q(num_states, num_actions);
  for (double& x : q.data()) x = scale * (2.0 * rng.uniform01() - 1.0);
  return q;
}

inline SparsityDistribution random_sparsity(Rng& rng, int num_actions) {
  SparsityDistribution p;
  p.probs.resize(num_actions);
  double total = 0.0;
  for (double& x : p.probs) {
    x = 0.1 + rng.uniform01();
    total += x;
  }
  for (double& x : p.probs) x /= total;
  return p;
}

// The backup evaluated exactly as written, without the max-subtraction
// rearrangement: an independent path for the equivalence check. Only safe
// for moderate Q/lambda ratios, which the caller controls.
inline QFunction naive_regularized_bellman(const SparseActionMdp& mdp, const QFunction& q,
                                           const SparsityDistribution& prior, double lambda) {
  std::vector<double> v(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    double acc = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) acc += prior.probs[a] * std::exp(q(s, a) / lambda);
    v[s] = lambda * std::log(acc);
  }
  QFunction out(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      auto next = mdp.next_dist(s, a);
      double ev = 0.0;
      for (int s2 = 0; s2 < mdp.num_states; ++s2) ev += next[s2] * v[s2];
      out(s, a) = mdp.reward(s, a) + mdp.discount * ev;
    }
  }
  return out;
}

inline const std::vector<double>& lambda_grid() {
  static const std::vector<double> grid = {0.005, 0.01, 0.05, 0.2, 1.0};
  return grid;
}

// Shared operating point for the benchmark criteria: five seeds, eight
// evaluation checkpoints, and identical optimizer settings for the agent and
// the baselines so the comparisons are apples to apples.
inline ExperimentConfig benchmark_config(long long steps) {
  ExperimentConfig cfg;
  cfg.total_steps = steps;
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.eval_interval = steps / 8;
  cfg.eval_episodes = 20;
  cfg.agent_config.lambda = 0.01;
  cfg.agent_config.sparsity_eval_episodes = 10;
  cfg.agent_config.batch_size = 64;
  cfg.agent_config.learn_rate = 0.02;
  cfg.agent_config.polyak = 0.01;
  cfg.agent_config.buffer_capacity = 60000;
  cfg.baseline_config.batch_size = 64;
  cfg.baseline_config.learn_rate = 0.02;
  cfg.baseline_config.polyak = 0.01;
  cfg.baseline_config.buffer_capacity = 60000;
  cfg.baseline_config.epsilon = {1.0, 0.05, steps / 3};
  return cfg;
}

// Fraction of all training decision steps on which a capped action was
// actually executed, over one full training record.
inline double train_sparse_frequency(const RunRecord& record, const SparseActionMdp& mdp) {
  if (record.rows.empty()) return 0.0;
  double executed = 0.0;
  for (const RunRecordRow& row : record.rows) {
    for (int a = 0; a < record.num_actions; ++a) {
      if (mdp.is_budgeted(a)) executed += static_cast<double>(row.executed[a]);
    }
  }
  double steps = static_cast<double>(record.rows.back().steps);
  return steps > 0.0 ? executed / steps : 0.0;
}

inline double mean_train_sparse_frequency(const AgentOutcome& outcome, const SparseActionMdp& mdp) {
  if (outcome.seeds.empty()) return 0.0;
  double acc = 0.0;
  for (const SeedOutcome& so : outcome.seeds) acc += train_sparse_frequency(so.record, mdp);
  return acc / static_cast<double>(outcome.seeds.size());
}

inline Matrix random_policy_matrix(Rng& rng, int num_states, int num_actions) {
  Matrix policy(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    double total = 0.0;
    for (int a = 0; a < num_actions; ++a) {
      policy(s, a) = 0.01 + rng.uniform01();
      total += policy(s, a);
    }
    for (int a = 0; a < num_actions; ++a) policy(s, a) /= total;
  }
  return policy;
}

}  // namespace detail

// 1. The regularized backup contracts with modulus gamma in the sup norm:
// 200 random table pairs spread over 20 random instances and three discounts.
inline CriterionResult criterion_contraction() {
  const double kTol = 1e-12;
  const double gammas[] = {0.5, 0.9, 0.99};
  Rng rng(101);
  double worst = -1e300;
  int pairs = 0;
  for (int m = 0; m < 20; ++m) {
    int num_states = 2 + m % 4;
    int num_actions = 2 + m % 3;
    double gamma = gammas[m % 3];
    SparseActionMdp mdp = detail::random_mdp(rng, num_states, num_actions, gamma);
    SparsityDistribution prior = detail::random_sparsity(rng, num_actions);
    for (int p = 0; p < 10; ++p) {
      double lambda = detail::lambda_grid()[(m * 10 + p) % 5];
      QFunction q1 = detail::random_q(rng, num_states, num_actions, 3.0);
      QFunction q2 = detail::random_q(rng, num_states, num_actions, 3.0);
      double lhs = max_abs_diff(regularized_bellman_apply(mdp, q1, prior, lambda),
                                regularized_bellman_apply(mdp, q2, prior, lambda));
      double rhs = gamma * max_abs_diff(q1, q2);
      worst = std::max(worst, lhs - rhs);
      ++pairs;
    }
  }
  return {1, "contraction", worst <= kTol,
          "max excess " + detail::fmt(worst) + " over " + std::to_string(pairs) + " pairs on 20 instances"};
}

// 2. The backup is monotone: Q <= Q' elementwise implies TQ <= TQ', on the
// same scale of random instances and discounts as the contraction check.
inline CriterionResult criterion_monotonicity() {
  const double kTol = 1e-12;
  const double gammas[] = {0.5, 0.9, 0.99};
  Rng rng(202);
  double worst = -1e300;
  int pairs = 0;
  for (int m = 0; m < 20; ++m) {
    int num_states = 2 + m % 4;
    int num_actions = 2 + m % 3;
    SparseActionMdp mdp = detail::random_mdp(rng, num_states, num_actions, gammas[m % 3]);
    SparsityDistribution prior = detail::random_sparsity(rng, num_actions);
    for (int p = 0; p < 10; ++p) {
      double lambda = detail::lambda_grid()[(m * 10 + p) % 5];
      QFunction q1 = detail::random_q(rng, num_states, num_actions, 3.0);
      QFunction q2 = q1;
      for (double& x : q2.data()) x += rng.uniform01();
      QFunction t1 = regularized_bellman_apply(mdp, q1, prior, lambda);
      QFunction t2 = regularized_bellman_apply(mdp, q2, prior, lambda);
      for (std::size_t i = 0; i < t1.data().size(); ++i) {
        worst = std::max(worst, t1.data()[i] - t2.data()[i]);
      }
      ++pairs;
    }
  }
  return {2, "monotonicity", worst <= kTol,
          "max violation " + detail::fmt(worst) + " over " + std::to_string(pairs) + " pairs on 20 instances"};
}

// 3. Value iteration reaches a fixed point with residual below 1e-10 on 20
// random instances across the working temperature grid; the policy extracted
// from it is near-optimal with the known additive bias bound, its per-state
// KL to the reference stays within the log bound, and its regularized return
// matches the soft state values.
inline CriterionResult criterion_fixed_point_and_bound() {
  const double kResidualTol = 1e-10;
  const double kBoundSlack = 1e-8;
  const double kKlTol = 1e-12;
  const double kConsistencyTol = 1e-6;
  const double lambdas[] = {0.005, 0.01, 0.05, 0.2};
  Rng rng(303);
  double worst_residual = 0.0, worst_bound = -1e300, worst_kl = -1e300, worst_cons = 0.0;
  for (int k = 0; k < 20; ++k) {
    int num_states = 2 + k % 4;
    int num_actions = 2 + k % 3;
    double lambda = lambdas[k % 4];
    SparseActionMdp mdp = detail::random_mdp(rng, num_states, num_actions, 0.9);
    SparsityDistribution prior = detail::random_sparsity(rng, num_actions);
    ValueIterationResult vi = regularized_value_iteration(mdp, prior, lambda, 1e-11);
    worst_residual =
        std::max(worst_residual, max_abs_diff(regularized_bellman_apply(mdp, vi.q, prior, lambda), vi.q));

    Matrix policy = extract_regularized_policy(vi.q, prior, lambda);
    std::vector<double> v_policy = exact_policy_evaluation(mdp, policy);
    std::vector<double> v_star = state_values(standard_value_iteration(mdp, 1e-12).q);
    double bias = lambda * prior.max_log_inverse() / (1.0 - mdp.discount);
    for (int s = 0; s < num_states; ++s) {
      worst_bound = std::max(worst_bound, (v_star[s] - bias) - v_policy[s]);
      worst_kl = std::max(worst_kl, kl_divergence(policy.row(s), prior.probs) - prior.max_log_inverse());
    }
    std::vector<double> v_reg = regularized_return(mdp, policy, prior, lambda);
    std::vector<double> v_soft = soft_state_values(vi.q, prior, lambda);
    for (int s = 0; s < num_states; ++s) {
      worst_cons = std::max(worst_cons, std::abs(v_reg[s] - v_soft[s]));
    }
  }
  bool pass = worst_residual <= kResidualTol && worst_bound <= kBoundSlack && worst_kl <= kKlTol &&
              worst_cons <= kConsistencyTol;
  return {3, "fixed point and value bound", pass,
          "residual " + detail::fmt(worst_residual) + ", bound excess " + detail::fmt(worst_bound) +
              ", kl excess " + detail::fmt(worst_kl) + ", return mismatch " + detail::fmt(worst_cons)};
}

// 4. The soft value is sandwiched between max Q minus the log-prior bias and
// max Q on 1000 random rows, and is exact on constant rows even at the
// smallest temperature.
inline CriterionResult criterion_soft_value_sandwich() {
  const double kTol = 1e-12;
  Rng rng(404);
  double worst = -1e300;
  for (int k = 0; k < 1000; ++k) {
    int num_actions = 2 + k % 5;
    double lambda = detail::lambda_grid()[k % 5];
    SparsityDistribution prior = detail::random_sparsity(rng, num_actions);
    std::vector<double> q(num_actions);
    double qmax = -1e300;
    for (double& x : q) {
      x = 10.0 * rng.uniform01() - 5.0;
      qmax = std::max(qmax, x);
    }
    double v = soft_value(q, prior, lambda);
    worst = std::max(worst, v - qmax);
    worst = std::max(worst, (qmax - lambda * prior.max_log_inverse()) - v);
  }
  double worst_const = 0.0;
  for (double c : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
    for (double lambda : {0.005, 1.0}) {
      std::vector<double> q(4, c);
      worst_const = std::max(worst_const, std::abs(soft_value(q, SparsityDistribution::uniform(4), lambda) - c));
    }
  }
  bool pass = worst <= kTol && worst_const <= kTol;
  return {4, "soft value sandwich", pass,
          "max sandwich excess " + detail::fmt(worst) + ", constant-row error " + detail::fmt(worst_const)};
}

// 5. Four oracle agreements: the stabilized backup against the formula
// written out naively on hand-built two-state instances, the tabular batch
// update against hand arithmetic, the linear-representation gradient against
// central finite differences, and plain value iteration against brute-force
// enumeration of every deterministic policy on the four-state chain.
inline CriterionResult criterion_oracle_equivalence() {
  const double kBackupTol = 1e-12;
  const double kHandTol = 1e-12;
  const double kGradTol = 1e-6;
  const double kEnumTol = 1e-8;

  // Hand-built two-state instances. Temperatures stay moderate so the naive
  // exponential form cannot overflow.
  double worst_backup = 0.0;
  {
    struct Case {
      int num_actions;
      double discount;
      std::vector<double> rewards;
      std::vector<double> transitions;
      std::vector<double> prior;
      std::vector<double> q;
      double lambda;
    };
    const std::vector<Case> cases = {
        {2, 0.9,
         {0.5, -0.25, 1.0, 0.0},
         {0.7, 0.3, 1.0, 0.0, 0.2, 0.8, 0.5, 0.5},
         {0.6, 0.4},
         {1.2, -0.4, 0.3, 2.0},
         0.05},
        {2, 0.9,
         {0.5, -0.25, 1.0, 0.0},
         {0.7, 0.3, 1.0, 0.0, 0.2, 0.8, 0.5, 0.5},
         {0.25, 0.75},
         {-2.0, -1.0, 0.5, 0.0},
         1.0},
        {3, 0.5,
         {0.1, 0.2, 0.3, -0.5, 0.4, 0.0},
         {1.0, 0.0, 0.5, 0.5, 0.0, 1.0, 0.0, 1.0, 0.5, 0.5, 1.0, 0.0},
         {0.2, 0.3, 0.5},
         {0.4, 0.5, -0.1, 1.0, -1.0, 0.25},
         0.2},
        {2, 0.99,
         {0.0, 1.0, -1.0, 0.0},
         {0.9, 0.1, 0.4, 0.6, 0.1, 0.9, 0.6, 0.4},
         {0.5, 0.5},
         {2.0, -2.0, -0.5, 0.5},
         0.05},
    };
    for (const Case& c : cases) {
      SparseActionMdp mdp = detail::make_explicit_mdp(2, c.num_actions, c.discount, c.rewards, c.transitions);
      SparsityDistribution prior;
      prior.probs = c.prior;
      QFunction q(2, c.num_actions);
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < c.num_actions; ++a) q(s, a) = c.q[static_cast<std::size_t>(s) * c.num_actions + a];
      }
      worst_backup = std::max(worst_backup, max_abs_diff(regularized_bellman_apply(mdp, q, prior, c.lambda),
                                                         detail::naive_regularized_bellman(mdp, q, prior, c.lambda)));
    }
  }

  // Hand-checked batch: zero tables make every soft value zero, so targets
  // are the rewards; gradient entries and the loss follow by hand.
  QParams params = QParams::tabular(2, 2);
  QParams target = params;
  std::vector<Transition> batch = {
      {0, 0, 0, 1.0, 1, false, 0}, {0, 0, 0, 0.5, 1, true, 0}, {1, 1, 1, -1.0, 0, false, 0}};
  SparsityDistribution uniform2 = SparsityDistribution::uniform(2);
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    targets[i] = td_target(target, batch[i], uniform2, 0.5, 0.9);
  }
  double loss = q_update(params, batch, targets, 0.1);
  double worst_hand = std::abs(params.table(0, 0) - 0.05);
  worst_hand = std::max(worst_hand, std::abs(params.table(1, 1) - (-0.1 / 3.0)));
  worst_hand = std::max(worst_hand, std::abs(params.table(0, 1)));
  worst_hand = std::max(worst_hand, std::abs(params.table(1, 0)));
  worst_hand = std::max(worst_hand, std::abs(loss - 0.375));

  // Finite differences on the linear form.
  Rng grad_rng(606);
  Matrix features(5, 4);
  for (double& x : features.data()) x = 2.0 * grad_rng.uniform01() - 1.0;
  QParams lin = QParams::linear(features, 3);
  for (double& x : lin.theta.data()) x = grad_rng.uniform01() - 0.5;
  std::vector<Transition> lin_batch;
  std::vector<double> lin_targets;
  for (int i = 0; i < 16; ++i) {
    lin_batch.push_back({grad_rng.uniform_int(5), grad_rng.uniform_int(3), 0, 0.0, 0, true, 0});
    lin_targets.push_back(2.0 * grad_rng.uniform01() - 1.0);
  }
  auto loss_at = [&](const QParams& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < lin_batch.size(); ++i) {
      double err = p.value(lin_batch[i].state, lin_batch[i].action) - lin_targets[i];
      acc += err * err;
    }
    return acc / (2.0 * lin_batch.size());
  };
  const double kLr = 0.25;
  QParams stepped = lin;
  q_update(stepped, lin_batch, lin_targets, kLr);
  double worst_grad = 0.0;
  const double kEps = 1e-6;
  for (int a = 0; a < 3; ++a) {
    for (int f = 0; f < 4; ++f) {
      double analytic = (lin.theta(a, f) - stepped.theta(a, f)) / kLr;
      QParams plus = lin, minus = lin;
      plus.theta(a, f) += kEps;
      minus.theta(a, f) -= kEps;
      double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * kEps);
      worst_grad = std::max(worst_grad, std::abs(analytic - numeric));
    }
  }

  // Brute force over all deterministic stationary policies of the chain:
  // the elementwise best of their exact values must match value iteration.
  double worst_enum = 0.0;
  {
    SparseActionMdp chain = build_chain_with_trigger(4, 1, 12);
    std::vector<double> v_star = state_values(standard_value_iteration(chain, 1e-12).q);
    int num_states = chain.num_states;
    int num_actions = chain.num_actions;
    long long total = 1;
    for (int s = 0; s < num_states; ++s) total *= num_actions;
    std::vector<double> best(num_states, -1e300);
    for (long long code = 0; code < total; ++code) {
      Matrix policy(num_states, num_actions, 0.0);
      long long rest = code;
      for (int s = 0; s < num_states; ++s) {
        policy(s, static_cast<int>(rest % num_actions)) = 1.0;
        rest /= num_actions;
      }
      std::vector<double> v = exact_policy_evaluation(chain, policy);
      for (int s = 0; s < num_states; ++s) best[s] = std::max(best[s], v[s]);
    }
    for (int s = 0; s < num_states; ++s) worst_enum = std::max(worst_enum, std::abs(best[s] - v_star[s]));
  }

  bool pass = worst_backup <= kBackupTol && worst_hand <= kHandTol && worst_grad <= kGradTol &&
              worst_enum <= kEnumTol;
  return {5, "oracle equivalence", pass,
          "backup " + detail::fmt(worst_backup) + ", hand batch " + detail::fmt(worst_hand) + ", grad fd " +
              detail::fmt(worst_grad) + ", policy enum " + detail::fmt(worst_enum)};
}

// 6. Discounted UCB on a two-arm Bernoulli bandit (0.8 vs 0.2, c = 0.5,
// decay 0.99): every unpulled arm is tried once first; in a stationary run
// the better arm takes more than 85 percent of the last 5000 of 10000
// rounds; and when the means swap at round 5000 the newly better arm wins a
// majority of the following 2000 rounds. Ten seeds each.
inline CriterionResult criterion_ducb_tracking() {
  const double kC = 0.5;
  const double kGammaTilde = 0.99;
  const int kRounds = 10000;
  const int kSwapRound = 5000;
  const int kRecoveryWindow = 2000;
  const double kStationaryShareMin = 0.85;
  const double kRecoveryShareMin = 0.5;

  DUcbState fresh(4, {kGammaTilde, kC});
  bool coverage = true;
  for (int expect = 0; expect < 4; ++expect) {
    int got = fresh.select_arm();
    coverage = coverage && got == expect && fresh.index(got) == std::numeric_limits<double>::infinity();
    fresh.update(got, 0.1 * got);
  }
  coverage = coverage && fresh.all_pulled();

  double worst_stationary = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    DUcbState bandit(2, {kGammaTilde, kC});
    int late_best = 0;
    for (int t = 0; t < kRounds; ++t) {
      int arm = bandit.select_arm();
      double p = (arm == 0) ? 0.8 : 0.2;
      bandit.update(arm, rng.uniform01() < p ? 1.0 : 0.0);
      if (t >= kRounds - 5000 && arm == 0) ++late_best;
    }
    worst_stationary = std::min(worst_stationary, late_best / 5000.0);
  }

  double worst_recovery = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    DUcbState bandit(2, {kGammaTilde, kC});
    int window_new = 0;
    for (int t = 0; t < kRounds; ++t) {
      int arm = bandit.select_arm();
      bool swapped = t >= kSwapRound;
      double p = (arm == 0) == !swapped ? 0.8 : 0.2;
      bandit.update(arm, rng.uniform01() < p ? 1.0 : 0.0);
      if (t >= kSwapRound && t < kSwapRound + kRecoveryWindow && arm == 1) ++window_new;
    }
    worst_recovery = std::min(worst_recovery, static_cast<double>(window_new) / kRecoveryWindow);
  }

  bool pass = coverage && worst_stationary > kStationaryShareMin && worst_recovery > kRecoveryShareMin;
  return {6, "discounted ucb tracking", pass,
          "coverage " + std::string(coverage ? "ok" : "broken") + ", worst stationary share " +
              detail::fmt(worst_stationary) + ", worst post-swap share " + detail::fmt(worst_recovery)};
}

// 7. The full learner, run with a frozen uniform reference and no constraint
// on a small deterministic instance, drives its table to within 0.05 of the
// exact regularized fixed point on every one of three seeds.
inline CriterionResult criterion_tabular_convergence() {
  const double kSupTol = 0.05;
  const long long kSteps = 60000;
  SparseActionMdp mdp;
  mdp.num_states = 3;
  mdp.num_actions = 2;
  mdp.discount = 0.8;
  mdp.horizon = 25;
  mdp.noop_action = 0;
  mdp.budgets = {kUnlimitedBudget, kUnlimitedBudget};
  mdp.terminal = {0, 0, 0};
  mdp.initial_dist = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  mdp.reward = Matrix(3, 2);
  double rewards[3][2] = {{0.1, 0.3}, {0.5, 0.0}, {0.2, 0.4}};
  mdp.transition.assign(3 * 2 * 3, 0.0);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      mdp.reward(s, a) = rewards[s][a];
      // Action 0 walks the ring; action 1 stays put.
      int s2 = a == 0 ? (s + 1) % 3 : s;
      mdp.transition[(static_cast<std::size_t>(s) * 2 + a) * 3 + s2] = 1.0;
    }
  }
  mdp.validate();

  AgentConfig config;
  config.lambda = 0.2;
  config.freeze_sparsity_uniform = true;
  config.disable_constraint = true;
  config.batch_size = 32;
  config.learn_rate = 0.05;
  config.polyak = 0.05;
  config.buffer_capacity = 4000;

  ValueIterationResult exact = regularized_value_iteration(mdp, SparsityDistribution::uniform(2), 0.2, 1e-12);
  double sup = 0.0;
  for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
    TrainResult result = train(mdp, config, kSteps, seed);
    sup = std::max(sup, max_abs_diff(result.params.table, exact.q));
  }
  return {7, "tabular convergence", sup <= kSupTol,
          "worst sup distance to fixed point " + detail::fmt(sup) + " over 3 seeds"};
}

// 8. Benchmark comparison at matched step budgets, five seeds each: the full
// agent must end with a higher mean final return than epsilon-greedy
// Q-learning on both the shooter task (cap 5) and the market task (cap 30),
// and during market training it must execute capped actions at no more than
// half the baseline's rate.
inline CriterionResult criterion_baseline_comparison() {
  const double kFrequencyMultiplier = 0.5;

  ExperimentConfig shooter_cfg = detail::benchmark_config(100000);
  shooter_cfg.env = EnvSpec{"shooter", {{"width", 5}, {"budget", 5}, {"horizon", 50}}};
  shooter_cfg.agent_config.lambda = 0.005;
  AgentOutcome shooter_agent = run_agent_experiment(shooter_cfg, "asre");
  AgentOutcome shooter_greedy = run_agent_experiment(shooter_cfg, "egreedy");

  ExperimentConfig market_cfg = detail::benchmark_config(30000);
  market_cfg.env = EnvSpec{"market", {{"price_levels", 5}, {"trade_budget", 30}, {"fee", 0.2}, {"horizon", 60}}};
  market_cfg.agent_config.lambda = 0.01;
  AgentOutcome market_agent = run_agent_experiment(market_cfg, "asre");
  AgentOutcome market_greedy = run_agent_experiment(market_cfg, "egreedy");

  SparseActionMdp market = market_cfg.env.build();
  double freq_agent = detail::mean_train_sparse_frequency(market_agent, market);
  double freq_greedy = detail::mean_train_sparse_frequency(market_greedy, market);

  bool shooter_ok = shooter_agent.mean_final > shooter_greedy.mean_final;
  bool market_ok = market_agent.mean_final > market_greedy.mean_final;
  bool freq_ok = freq_agent <= kFrequencyMultiplier * freq_greedy;
  bool pass = shooter_ok && market_ok && freq_ok;
  return {8, "baseline comparison", pass,
          "shooter " + detail::fmt(shooter_agent.mean_final) + " vs " + detail::fmt(shooter_greedy.mean_final) +
              ", market " + detail::fmt(market_agent.mean_final) + " vs " + detail::fmt(market_greedy.mean_final) +
              ", trade freq " + detail::fmt(freq_agent) + " vs " + detail::fmt(freq_greedy) + " (need <= " +
              detail::fmt(kFrequencyMultiplier) + "x)"};
}

// 9. Ablation on the shooter task, five seeds: replacing the regularized
// backup and soft deployment with the hard max and greedy deployment, while
// keeping the sampling constraint and the bandit running, must end strictly
// below the full agent's mean final return.
inline CriterionResult criterion_regularization_ablation() {
  ExperimentConfig cfg = detail::benchmark_config(50000);
  cfg.env = EnvSpec{"shooter", {{"width", 5}, {"budget", 5}, {"horizon", 50}}};
  cfg.agent_config.lambda = 0.005;
  AgentOutcome full = run_agent_experiment(cfg, "asre");

  ExperimentConfig cut_cfg = cfg;
  cut_cfg.agent_config.disable_regularization = true;
  AgentOutcome cut = run_agent_experiment(cut_cfg, "asre");

  bool pass = cut.mean_final < full.mean_final;
  return {9, "regularization ablation", pass,
          "full " + detail::fmt(full.mean_final) + " vs ablated " + detail::fmt(cut.mean_final)};
}

// 10. Temperature ordering on the shooter task, five seeds: the heavy
// setting 0.2 must end with a strictly lower mean final return than the
// working setting 0.01.
inline CriterionResult criterion_lambda_sweep() {
  const double kReferenceLambda = 0.01;
  const double kHeavyLambda = 0.2;
  ExperimentConfig cfg = detail::benchmark_config(30000);
  cfg.env = EnvSpec{"shooter", {{"width", 5}, {"budget", 5}, {"horizon", 50}}};

  cfg.agent_config.lambda = kReferenceLambda;
  AgentOutcome reference = run_agent_experiment(cfg, "asre");
  cfg.agent_config.lambda = kHeavyLambda;
  AgentOutcome heavy = run_agent_experiment(cfg, "asre");

  bool pass = heavy.mean_final < reference.mean_final;
  return {10, "lambda sweep ordering", pass,
          "lambda " + detail::fmt(kReferenceLambda) + ": " + detail::fmt(reference.mean_final) + ", lambda " +
              detail::fmt(kHeavyLambda) + ": " + detail::fmt(heavy.mean_final)};
}

// 11. Bitwise determinism: the same config run twice produces byte-identical
// output trees, and the same training call repeats its parameters exactly.
inline CriterionResult criterion_determinism() {
  SparseActionMdp chain = build_chain_with_trigger(4, 1, 12);
  AgentConfig config;
  config.lambda = 0.05;
  config.sparsity_eval_episodes = 5;
  config.batch_size = 32;
  config.learn_rate = 0.05;
  config.polyak = 0.05;
  config.buffer_capacity = 4000;
  TrainResult first = train(chain, config, 3000, 42);
  TrainResult second = train(chain, config, 3000, 42);
  bool params_match = first.params.dense() == second.params.dense() &&
                      first.ptilde.probs == second.ptilde.probs &&
                      first.record.rows.size() == second.record.rows.size();

  ExperimentConfig cfg;
  cfg.env = EnvSpec{"chain", {{"length", 4}, {"trigger_budget", 1}, {"horizon", 12}}};
  cfg.total_steps = 3000;
  cfg.seeds = {0, 1};
  cfg.eval_interval = 500;
  cfg.eval_episodes = 5;
  cfg.agent_config = config;

  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "asre_verify_determinism";
  fs::remove_all(base);
  ExperimentConfig run_a = cfg, run_b = cfg;
  run_a.output_dir = (base / "a").string();
  run_b.output_dir = (base / "b").string();
  run_experiment(run_a);
  run_experiment(run_b);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  bool files_match = true;
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    fs::path twin = base / "b" / entry.path().filename();
    files_match = files_match && fs::exists(twin) && slurp(entry.path()) == slurp(twin);
    ++compared;
  }
  fs::remove_all(base);
  bool pass = params_match && files_match && compared >= 4;
  return {11, "determinism", pass,
          std::string(params_match ? "parameters identical" : "parameters diverged") + ", " +
              std::to_string(compared) + " files " + (files_match ? "byte-identical" : "differ")};
}

// 12. Budget safety: 1000 episodes driven by fresh random policies across
// all three tasks never exceed any cap; an always-requesting policy shows
// the substitution path; a zero cap seals its action off entirely; and
// trained agents inherit all of it.
inline CriterionResult criterion_budget_safety() {
  Rng rng(99);
  bool caps_hold = true;
  long long fuzzed = 0;
  const std::vector<std::pair<SparseActionMdp, int>> fuzz_cases = {
      {build_budgeted_shooter(5, 5, 50), 334},
      {EnvSpec{"market", {}}.build(), 333},
      {build_chain_with_trigger(4, 1, 12), 333},
  };
  for (const auto& [mdp, episodes] : fuzz_cases) {
    for (int ep = 0; ep < episodes; ++ep) {
      Matrix policy = detail::random_policy_matrix(rng, mdp.num_states, mdp.num_actions);
      Trajectory traj = run_episode(mdp, make_policy(policy), rng);
      std::vector<long long> executed(mdp.num_actions, 0);
      for (const Transition& tr : traj.transitions) ++executed[tr.action];
      for (int a = 0; a < mdp.num_actions; ++a) {
        if (mdp.is_budgeted(a) && executed[a] > mdp.budgets[a]) caps_hold = false;
      }
      ++fuzzed;
    }
  }

  // The hardest push: request the capped action every single step.
  SparseActionMdp shooter = build_budgeted_shooter(3, 2, 20);
  PolicyFn always_fire = [](int) { return std::vector<double>{0.0, 0.0, 0.0, 1.0}; };
  bool substitution_seen = false;
  for (int ep = 0; ep < 50; ++ep) {
    Trajectory traj = run_episode(shooter, always_fire, rng);
    long long fired = 0;
    for (const Transition& tr : traj.transitions) {
      if (tr.action == 3) ++fired;
      if (tr.requested_action == 3 && tr.action == 0) substitution_seen = true;
    }
    caps_hold = caps_hold && fired <= 2;
  }

  AgentConfig config;
  config.lambda = 0.01;
  config.sparsity_eval_episodes = 5;
  config.batch_size = 32;
  config.learn_rate = 0.05;
  config.polyak = 0.05;
  config.buffer_capacity = 4000;
  TrainResult trained = train(shooter, config, 3000, 5);
  bool training_rows_ok = true;
  for (const RunRecordRow& row : trained.record.rows) {
    training_rows_ok = training_rows_ok && row.executed[3] <= 2;
  }
  Rng eval_rng(123);
  PolicyFn trained_policy = make_policy(trained.final_policy);
  bool eval_ok = true;
  for (int ep = 0; ep < 50; ++ep) {
    Trajectory traj = run_episode(shooter, trained_policy, eval_rng);
    long long fired = 0;
    for (const Transition& tr : traj.transitions) fired += tr.action == 3 ? 1 : 0;
    eval_ok = eval_ok && fired <= 2;
  }

  SparseActionMdp sealed = build_chain_with_trigger(4, 0, 12);
  Rng sealed_rng(7);
  PolicyFn always_trigger = [](int) { return std::vector<double>{0.0, 1.0}; };
  bool sealed_ok = true;
  for (int ep = 0; ep < 20; ++ep) {
    Trajectory traj = run_episode(sealed, always_trigger, sealed_rng);
    for (const Transition& tr : traj.transitions) sealed_ok = sealed_ok && tr.action == 0;
    sealed_ok = sealed_ok && traj.undiscounted_return() == 0.0;
  }

  bool pass = caps_hold && substitution_seen && training_rows_ok && eval_ok && sealed_ok;
  return {12, "budget safety", pass,
          std::to_string(fuzzed) + " random episodes, " + std::string(caps_hold ? "caps hold" : "CAP BREACH") +
              ", substitution " + (substitution_seen ? "recorded" : "missing") + ", zero-cap action " +
              (sealed_ok ? "sealed" : "leaked")};
}

inline const std::vector<std::function<CriterionResult()>>& all_criteria() {
  static const std::vector<std::function<CriterionResult()>> criteria = {
      criterion_contraction,         criterion_monotonicity,          criterion_fixed_point_and_bound,
      criterion_soft_value_sandwich, criterion_oracle_equivalence,    criterion_ducb_tracking,
      criterion_tabular_convergence, criterion_baseline_comparison,   criterion_regularization_ablation,
      criterion_lambda_sweep,        criterion_determinism,           criterion_budget_safety};
  return criteria;
}

// Runs the requested criteria (all twelve when `ids` is empty), timing each.
// A thrown exception fails the criterion instead of aborting the sweep.
inline std::vector<CriterionResult> run_criteria(const std::vector<int>& ids = {}) {
  std::vector<int> todo = ids;
  if (todo.empty()) {
    for (int i = 1; i <= 12; ++i) todo.push_back(i);
  }
  std::vector<CriterionResult> results;
  for (int id : todo) {
    if (id < 1 || id > 12) throw std::invalid_argument("run_criteria: criterion id out of range");
    auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = all_criteria()[id - 1]();
    } catch (const std::exception& err) {
      result = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + err.what()};
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(result));
  }
  return results;
}

// One line per criterion plus a summary; returns the process exit code.
inline int print_results(const std::vector<CriterionResult>& results, std::ostream& out) {
  int passed = 0;
  for (const CriterionResult& r : results) {
    std::string name = r.name;
    if (name.size() < 28) name += ' ' + std::string(27 - name.size(), '.');
    std::ostringstream line;
    line << "[" << std::setw(2) << r.id << "/12] " << name << " " << (r.pass ? "PASS" : "FAIL") << " ("
         << std::fixed << std::setprecision(2) << r.seconds << "s) " << r.detail;
    out << line.str() << "\n";
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace asre::verify

#endif  // ASRE_VERIFY_HPP_
