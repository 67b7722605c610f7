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

#ifndef ASRE_SOFT_BELLMAN_HPP_
#define ASRE_SOFT_BELLMAN_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "asre/matrix.hpp"
#include "asre/mdp.hpp"

namespace asre {

// Reference distribution over actions that the KL regularizer pulls the
// policy toward. Must be strictly positive everywhere: a zero entry would
// make the KL penalty infinite and the log-average-exp backup undefined.
struct SparsityDistribution {
  std::vector<double> probs;

  static SparsityDistribution uniform(int num_actions) {
    return {std::vector<double>(num_actions, 1.0 / num_actions)};
  }

  void validate() const {
    if (probs.empty()) throw std::invalid_argument("SparsityDistribution: empty");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p > 0.0)) throw std::invalid_argument("SparsityDistribution: entries must be strictly positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SparsityDistribution: does not sum to 1");
  }

  // max_a log(1 / p(a)), the constant that scales the regularization bias.
  double max_log_inverse() const {
    double worst = 0.0;
    for (double p : probs) worst = std::max(worst, std::log(1.0 / p));
    return worst;
  }
};

struct RegularizationConfig {
  double lambda = 0.01;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("RegularizationConfig: lambda must be positive");
  }
};

using QFunction = Matrix;

// KL(p || q) with the 0 * log 0 terms dropped. Infinite when p puts mass
// where q has none.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

// lambda * log sum_a p(a) exp(q_a / lambda), evaluated with the row maximum
// factored out. The subtraction keeps every exponent nonpositive, so the sum
// stays finite even for lambda on the order of 1e-3 where raw exp(q/lambda)
// overflows immediately.
inline double soft_value(std::span<const double> q_row, const SparsityDistribution& prior, double lambda) {
  if (q_row.size() != prior.probs.size()) throw std::invalid_argument("soft_value: size mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("soft_value: lambda must be positive");
  double m = -std::numeric_limits<double>::infinity();
  for (double q : q_row) m = std::max(m, q);
  double acc = 0.0;
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    acc += prior.probs[a] * std::exp((q_row[a] - m) / lambda);
  }
  return m + lambda * std::log(acc);
}

// Soft state values, one soft_value per row of Q.
inline std::vector<double> soft_state_values(const QFunction& q, const SparsityDistribution& prior, double lambda) {
  std::vector<double> v(q.rows());
  for (int s = 0; s < q.rows(); ++s) v[s] = soft_value(q.row(s), prior, lambda);
  return v;
}

// Hard state values, max per row of Q.
inline std::vector<double> state_values(const QFunction& q) {
  std::vector<double> v(q.rows());
  for (int s = 0; s < q.rows(); ++s) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : q.row(s)) m = std::max(m, x);
    v[s] = m;
  }
  return v;
}

// One application of the KL-regularized optimality backup:
//   (T Q)(s, a) = r(s, a) + gamma * sum_{s'} P(s'|s,a) * soft_value(Q(s', .)).
inline QFunction regularized_bellman_apply(const SparseActionMdp& mdp, const QFunction& q,
                                           const SparsityDistribution& prior, double lambda) {
  if (q.rows() != mdp.num_states || q.cols() != mdp.num_actions) {
    throw std::invalid_argument("regularized_bellman_apply: Q has wrong shape");
  }
  std::vector<double> v = soft_state_values(q, prior, lambda);
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

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

struct ValueIterationResult {
  QFunction q;
  int iterations = 0;
};

// Iterates the regularized backup from Q = 0 until successive iterates agree
// to `tol` in the infinity norm. The backup is a gamma-contraction, so this
// terminates in roughly log(tol) / log(gamma) applications; exhausting
// max_iters means the instance is ill-posed and raises NonConvergenceError.
inline ValueIterationResult regularized_value_iteration(const SparseActionMdp& mdp,
                                                        const SparsityDistribution& prior, double lambda,
                                                        double tol = 1e-10, int max_iters = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("regularized_value_iteration: tol must be positive");
  prior.validate();
  QFunction q(mdp.num_states, mdp.num_actions, 0.0);
  double diff = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iters; ++iter) {
    QFunction next = regularized_bellman_apply(mdp, q, prior, lambda);
    diff = max_abs_diff(next, q);
    q = std::move(next);
    if (diff <= tol) return {std::move(q), iter};
  }
  throw NonConvergenceError("regularized_value_iteration: exceeded max_iters", diff, max_iters);
}

// Unregularized value iteration on the max backup, for reference values.
inline ValueIterationResult standard_value_iteration(const SparseActionMdp& mdp, double tol = 1e-10,
                                                     int max_iters = 100000) {
  if (!(tol > 0.0)) throw std::invalid_argument("standard_value_iteration: tol must be positive");
  QFunction q(mdp.num_states, mdp.num_actions, 0.0);
  double diff = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iters; ++iter) {
    std::vector<double> v = state_values(q);
    QFunction next(mdp.num_states, mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        auto dist = mdp.next_dist(s, a);
        double ev = 0.0;
        for (int s2 = 0; s2 < mdp.num_states; ++s2) ev += dist[s2] * v[s2];
        next(s, a) = mdp.reward(s, a) + mdp.discount * ev;
      }
    }
    diff = max_abs_diff(next, q);
    q = std::move(next);
    if (diff <= tol) return {std::move(q), iter};
  }
  throw NonConvergenceError("standard_value_iteration: exceeded max_iters", diff, max_iters);
}

// Closed-form maximizer of the regularized objective for a given Q:
//   pi(a|s) proportional to p(a) * exp(Q(s,a) / lambda).
// Computed in log space with the row maximum subtracted, then normalized.
inline Matrix extract_regularized_policy(const QFunction& q, const SparsityDistribution& prior, double lambda) {
  prior.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("extract_regularized_policy: lambda must be positive");
  if (q.cols() != static_cast<int>(prior.probs.size())) {
    throw std::invalid_argument("extract_regularized_policy: shape mismatch");
  }
  Matrix pi(q.rows(), q.cols());
  std::vector<double> logits(q.cols());
  for (int s = 0; s < q.rows(); ++s) {
    double m = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < q.cols(); ++a) {
      logits[a] = std::log(prior.probs[a]) + q(s, a) / lambda;
      m = std::max(m, logits[a]);
    }
    double sum = 0.0;
    for (int a = 0; a < q.cols(); ++a) {
      pi(s, a) = std::exp(logits[a] - m);
      sum += pi(s, a);
    }
    for (int a = 0; a < q.cols(); ++a) pi(s, a) /= sum;
  }
  return pi;
}

// Regularized return of a fixed stochastic policy: the discounted sum of
// reward minus lambda times the per-state KL to the reference distribution,
//   V = (r_pi - lambda * kl_pi) + gamma * P_pi * V.
// Solved directly on small instances, by fixed-point iteration otherwise.
inline std::vector<double> regularized_return(const SparseActionMdp& mdp, const Matrix& policy,
                                              const SparsityDistribution& prior, double lambda) {
  detail::check_stochastic_rows(policy, mdp.num_actions, "regularized_return");
  if (policy.rows() != mdp.num_states) {
    throw std::invalid_argument("regularized_return: policy has wrong number of states");
  }
  prior.validate();
  int n = mdp.num_states;
  std::vector<double> r_reg(n, 0.0);
  Matrix p_pi(n, n, 0.0);
  for (int s = 0; s < n; ++s) {
    double expect_r = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      double w = policy(s, a);
      if (w == 0.0) continue;
      expect_r += w * mdp.reward(s, a);
      auto next = mdp.next_dist(s, a);
      for (int s2 = 0; s2 < n; ++s2) p_pi(s, s2) += w * next[s2];
    }
    r_reg[s] = expect_r - lambda * kl_divergence(policy.row(s), prior.probs);
  }
  if (static_cast<long long>(n) * mdp.num_actions <= 10000) {
    Matrix system(n, n, 0.0);
    for (int s = 0; s < n; ++s) {
      for (int s2 = 0; s2 < n; ++s2) system(s, s2) = (s == s2 ? 1.0 : 0.0) - mdp.discount * p_pi(s, s2);
    }
    return detail::solve_linear(std::move(system), r_reg);
  }
  std::vector<double> v(n, 0.0), next_v(n, 0.0);
  for (long long iter = 0; iter < 10000000; ++iter) {
    double diff = 0.0;
    for (int s = 0; s < n; ++s) {
      double acc = r_reg[s];
      for (int s2 = 0; s2 < n; ++s2) acc += mdp.discount * p_pi(s, s2) * v[s2];
      next_v[s] = acc;
      diff = std::max(diff, std::abs(acc - v[s]));
    }
    v.swap(next_v);
    if (diff <= 1e-12) return v;
  }
  throw std::runtime_error("regularized_return: iteration did not converge");
}

}  // namespace asre

#endif  // ASRE_SOFT_BELLMAN_HPP_
