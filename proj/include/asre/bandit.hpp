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

#ifndef ASRE_BANDIT_HPP_
#define ASRE_BANDIT_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace asre {

struct DUcbConfig {
  // Per-update discount on the pull counts and reward sums. Values below 1
  // let the bandit forget, which it needs because arm payoffs drift as the
  // learner underneath improves.
  double gamma_tilde = 0.99;
  // Exploration width in front of the sqrt bonus.
  double c = 0.5;

  void validate() const {
    if (!(gamma_tilde > 0.0) || gamma_tilde > 1.0) {
      throw std::invalid_argument("DUcbConfig: gamma_tilde must lie in (0, 1]");
    }
    if (!(c >= 0.0)) throw std::invalid_argument("DUcbConfig: c must be nonnegative");
  }
};

// Discounted UCB over a fixed arm set. Each update decays every arm's count
// and reward sum by gamma_tilde, then adds the new observation to the arm
// that was pulled, so old evidence fades at the same rate everywhere.
class DUcbState {
 public:
  explicit DUcbState(int num_arms, DUcbConfig config = {}) : config_(config) {
    if (num_arms < 1) throw std::invalid_argument("DUcbState: need at least one arm");
    config_.validate();
    counts_.assign(num_arms, 0.0);
    sums_.assign(num_arms, 0.0);
  }

  int num_arms() const { return static_cast<int>(counts_.size()); }

  // Index of the arm maximizing mean + c * sqrt(log t / count), where t is
  // the total discounted count. An arm never pulled scores +infinity, so all
  // arms get tried before the bonus term matters. Ties break toward the
  // lowest index.
  int select_arm() const {
    int best = 0;
    double best_score = index(0);
    for (int a = 1; a < num_arms(); ++a) {
      double score = index(a);
      if (score > best_score) {
        best = a;
        best_score = score;
      }
    }
    return best;
  }

  double index(int a) const {
    if (counts_[a] <= 0.0) return std::numeric_limits<double>::infinity();
    double t = total_count();
    // After at least one update t >= 1, so the log is nonnegative.
    return mean(a) + config_.c * std::sqrt(std::log(t) / counts_[a]);
  }

  // Records one observation for `selected`. Every arm decays first; only the
  // selected arm receives the increment.
  void update(int selected, double reward) {
    if (selected < 0 || selected >= num_arms()) throw std::out_of_range("DUcbState: arm out of range");
    for (int a = 0; a < num_arms(); ++a) {
      counts_[a] *= config_.gamma_tilde;
      sums_[a] *= config_.gamma_tilde;
    }
    counts_[selected] += 1.0;
    sums_[selected] += reward;
  }

  bool pulled(int a) const { return counts_[a] > 0.0; }

  bool all_pulled() const {
    for (double c : counts_) {
      if (c <= 0.0) return false;
    }
    return true;
  }

  // Discounted empirical mean; only meaningful once the arm has been pulled.
  double mean(int a) const {
    if (counts_[a] <= 0.0) throw std::logic_error("DUcbState: mean of an unpulled arm");
    return sums_[a] / counts_[a];
  }

  // Means with `fallback` substituted for arms that have no observations yet,
  // for export into run records.
  std::vector<double> means_or(double fallback) const {
    std::vector<double> out(num_arms(), fallback);
    for (int a = 0; a < num_arms(); ++a) {
      if (counts_[a] > 0.0) out[a] = mean(a);
    }
    return out;
  }

  double discounted_count(int a) const { return counts_[a]; }

  double total_count() const {
    double t = 0.0;
    for (double c : counts_) t += c;
    return t;
  }

 private:
  DUcbConfig config_;
  std::vector<double> counts_;
  std::vector<double> sums_;
};

}  // namespace asre

#endif  // ASRE_BANDIT_HPP_
