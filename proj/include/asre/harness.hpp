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

#ifndef ASRE_HARNESS_HPP_
#define ASRE_HARNESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "asre/agent.hpp"
#include "asre/baselines.hpp"
#include "asre/config.hpp"
#include "asre/envs.hpp"
#include "asre/mdp.hpp"
#include "asre/run_record.hpp"
#include "asre/svg.hpp"

namespace asre {

// Everything one experiment needs: the environment, which agent to train,
// the step budget, the seed list, and the evaluation protocol. Seeds run in
// parallel; all randomness is derived from the listed seeds, so rerunning a
// config reproduces every output file byte for byte.
struct ExperimentConfig {
  EnvSpec env{"chain", {}};
  std::string agent = "asre";
  long long total_steps = 20000;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::string output_dir = "out";
  long long eval_interval = 2000;
  int eval_episodes = 20;
  AgentConfig agent_config;
  BaselineConfig baseline_config;
  // Ground-truth scarce actions for the prior_penalty agent; empty means
  // "every capped action of the environment".
  std::vector<int> sparse_actions;

  void validate() const;
  static ExperimentConfig from_config(const ConfigTree& tree);
};

inline const std::vector<std::string>& known_agents() {
  static const std::vector<std::string> agents = {"asre", "egreedy", "softq", "prior_penalty"};
  return agents;
}

inline void ExperimentConfig::validate() const {
  if (std::find(known_agents().begin(), known_agents().end(), agent) == known_agents().end()) {
    throw ConfigError("unknown agent '" + agent + "'");
  }
  if (total_steps < 1) throw ConfigError("total_steps must be positive");
  if (seeds.empty()) throw ConfigError("need at least one seed");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("duplicate seeds");
  if (eval_interval < 1) throw ConfigError("eval_interval must be positive");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  EnvSpec::default_params(env.name);  // rejects unknown names
}

namespace detail {

inline void reject_unknown_keys(const ConfigTree& tree, const std::string& section,
                                const std::set<std::string>& known) {
  auto it = tree.sections().find(section);
  if (it == tree.sections().end()) return;
  for (const auto& [key, value] : it->second) {
    if (known.find(key) == known.end()) {
      throw ConfigError("unknown key '" + section + "." + key + "'");
    }
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_config(const ConfigTree& tree) {
  for (const auto& [section, keys] : tree.sections()) {
    if (section != "experiment" && section != "env" && section != "asre" && section != "baseline") {
      throw ConfigError("unknown section '" + section + "'");
    }
  }
  detail::reject_unknown_keys(tree, "experiment",
                              {"agent", "agents", "total_steps", "seeds", "output_dir", "eval_interval",
                               "eval_episodes"});
  detail::reject_unknown_keys(tree, "asre",
                              {"lambda", "sparsity_eval_episodes", "batch_size", "learn_rate", "polyak",
                               "delta", "bandit_c", "bandit_gamma", "buffer_capacity", "representation",
                               "behavior_lambda_temperature", "bandit_reward_discounted",
                               "bandit_reward_normalized", "bootstrap_on_truncation",
                               "freeze_sparsity_uniform", "disable_constraint", "disable_regularization",
                               "greedy_eval"});
  detail::reject_unknown_keys(tree, "baseline",
                              {"epsilon_start", "epsilon_end", "epsilon_decay_steps", "entropy_coef",
                               "penalty", "batch_size", "learn_rate", "polyak", "buffer_capacity",
                               "representation", "bootstrap_on_truncation", "sparse_actions"});

  ExperimentConfig cfg;
  if (tree.find("env", "name")) {
    cfg.env.name = tree.at("env", "name").as_string();
    const std::map<std::string, double> defaults = EnvSpec::default_params(cfg.env.name);
    auto it = tree.sections().find("env");
    for (const auto& [key, value] : it->second) {
      if (key == "name") continue;
      if (defaults.find(key) == defaults.end()) {
        throw ConfigError("unknown key 'env." + key + "'");
      }
      cfg.env.params[key] = value.as_number();
    }
  }
  cfg.agent = tree.string_or("experiment", "agent", cfg.agent);
  cfg.total_steps = tree.int_or("experiment", "total_steps", cfg.total_steps);
  if (const ConfigValue* v = tree.find("experiment", "seeds")) {
    cfg.seeds.clear();
    for (long long s : v->as_ints()) {
      if (s < 0) throw ConfigError("seeds must be nonnegative");
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  cfg.output_dir = tree.string_or("experiment", "output_dir", cfg.output_dir);
  cfg.eval_interval = tree.int_or("experiment", "eval_interval", cfg.eval_interval);
  cfg.eval_episodes = static_cast<int>(tree.int_or("experiment", "eval_episodes", cfg.eval_episodes));

  AgentConfig& ac = cfg.agent_config;
  ac.lambda = tree.number_or("asre", "lambda", ac.lambda);
  ac.sparsity_eval_episodes =
      static_cast<int>(tree.int_or("asre", "sparsity_eval_episodes", ac.sparsity_eval_episodes));
  ac.batch_size = static_cast<int>(tree.int_or("asre", "batch_size", ac.batch_size));
  ac.learn_rate = tree.number_or("asre", "learn_rate", ac.learn_rate);
  ac.polyak = tree.number_or("asre", "polyak", ac.polyak);
  ac.delta = tree.number_or("asre", "delta", ac.delta);
  ac.bandit.c = tree.number_or("asre", "bandit_c", ac.bandit.c);
  ac.bandit.gamma_tilde = tree.number_or("asre", "bandit_gamma", ac.bandit.gamma_tilde);
  ac.buffer_capacity = tree.int_or("asre", "buffer_capacity", ac.buffer_capacity);
  std::string repr = tree.string_or("asre", "representation", "tabular");
  if (repr != "tabular" && repr != "linear") throw ConfigError("asre.representation must be tabular or linear");
  ac.q_representation = repr == "tabular" ? QRepr::kTabular : QRepr::kLinearFeatures;
  ac.behavior_lambda_temperature =
      tree.bool_or("asre", "behavior_lambda_temperature", ac.behavior_lambda_temperature);
  ac.bandit_reward_discounted = tree.bool_or("asre", "bandit_reward_discounted", ac.bandit_reward_discounted);
  ac.bandit_reward_normalized = tree.bool_or("asre", "bandit_reward_normalized", ac.bandit_reward_normalized);
  ac.bootstrap_on_truncation = tree.bool_or("asre", "bootstrap_on_truncation", ac.bootstrap_on_truncation);
  ac.freeze_sparsity_uniform = tree.bool_or("asre", "freeze_sparsity_uniform", ac.freeze_sparsity_uniform);
  ac.disable_constraint = tree.bool_or("asre", "disable_constraint", ac.disable_constraint);
  ac.disable_regularization = tree.bool_or("asre", "disable_regularization", ac.disable_regularization);
  ac.greedy_eval = tree.bool_or("asre", "greedy_eval", ac.greedy_eval);

  BaselineConfig& bc = cfg.baseline_config;
  bc.epsilon.start = tree.number_or("baseline", "epsilon_start", bc.epsilon.start);
  bc.epsilon.end = tree.number_or("baseline", "epsilon_end", bc.epsilon.end);
  bc.epsilon.decay_steps = tree.int_or("baseline", "epsilon_decay_steps", bc.epsilon.decay_steps);
  bc.entropy_coef = tree.number_or("baseline", "entropy_coef", bc.entropy_coef);
  bc.penalty = tree.number_or("baseline", "penalty", bc.penalty);
  bc.batch_size = static_cast<int>(tree.int_or("baseline", "batch_size", bc.batch_size));
  bc.learn_rate = tree.number_or("baseline", "learn_rate", bc.learn_rate);
  bc.polyak = tree.number_or("baseline", "polyak", bc.polyak);
  bc.buffer_capacity = tree.int_or("baseline", "buffer_capacity", bc.buffer_capacity);
  std::string brepr = tree.string_or("baseline", "representation", "tabular");
  if (brepr != "tabular" && brepr != "linear") {
    throw ConfigError("baseline.representation must be tabular or linear");
  }
  bc.q_representation = brepr == "tabular" ? QRepr::kTabular : QRepr::kLinearFeatures;
  bc.bootstrap_on_truncation = tree.bool_or("baseline", "bootstrap_on_truncation", bc.bootstrap_on_truncation);
  if (const ConfigValue* v = tree.find("baseline", "sparse_actions")) {
    for (long long a : v->as_ints()) cfg.sparse_actions.push_back(static_cast<int>(a));
  }

  cfg.validate();
  return cfg;
}

// Mean undiscounted return of `episodes` rollouts with budget caps active.
inline double evaluate_policy(const SparseActionMdp& mdp, const Matrix& policy, int episodes, Rng& rng) {
  detail::check_stochastic_rows(policy, mdp.num_actions, "evaluate_policy");
  double total = 0.0;
  PolicyFn fn = make_policy(policy);
  for (int ep = 0; ep < episodes; ++ep) {
    total += run_episode(mdp, fn, rng).undiscounted_return();
  }
  return total / episodes;
}

struct CheckpointScore {
  long long steps = 0;
  double mean_return = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<CheckpointScore> curve;
  // Mean over the last up-to-5 checkpoint scores; the headline number.
  double final_score = 0.0;
  RunRecord record;
  SparsityDistribution final_ptilde{{1.0}};
};

struct AgentOutcome {
  std::string agent;
  std::vector<SeedOutcome> seeds;
  double mean_final = 0.0;
  double std_final = 0.0;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return xs.empty() ? 0.0 : m / xs.size();
}

// Sample standard deviation; zero for fewer than two points.
inline double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / (xs.size() - 1));
}

inline TrainResult dispatch_train(const std::string& agent, const SparseActionMdp& mdp,
                                  const ExperimentConfig& cfg, std::uint64_t seed, const TrainHooks& hooks) {
  if (agent == "asre") return train(mdp, cfg.agent_config, cfg.total_steps, seed, hooks);
  if (agent == "egreedy") return egreedy_q_train(mdp, cfg.baseline_config, cfg.total_steps, seed, hooks);
  if (agent == "softq") return softq_train(mdp, cfg.baseline_config, cfg.total_steps, seed, hooks);
  if (agent == "prior_penalty") {
    std::vector<int> sparse = cfg.sparse_actions;
    if (sparse.empty()) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        if (mdp.is_budgeted(a)) sparse.push_back(a);
      }
    }
    return prior_penalty_train(mdp, cfg.baseline_config, sparse, cfg.total_steps, seed, hooks);
  }
  throw ConfigError("unknown agent '" + agent + "'");
}

}  // namespace detail

// Trains one agent on every seed, evaluating checkpoints every eval_interval
// steps. Seeds run on their own threads; evaluation rollouts draw from a
// stream derived from (seed, checkpoint index), so they cannot perturb the
// training stream and results do not depend on thread scheduling.
inline AgentOutcome run_agent_experiment(const ExperimentConfig& cfg, const std::string& agent_name) {
  cfg.validate();
  AgentOutcome outcome;
  outcome.agent = agent_name;
  outcome.seeds.resize(cfg.seeds.size());

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    workers.emplace_back([&cfg, &agent_name, &outcome, &errors, i]() {
      try {
        std::uint64_t seed = cfg.seeds[i];
        SparseActionMdp mdp = cfg.env.build();
        SeedOutcome& so = outcome.seeds[i];
        so.seed = seed;

        long long checkpoint_index = 0;
        TrainHooks hooks;
        hooks.checkpoint_interval = cfg.eval_interval;
        hooks.on_checkpoint = [&](const TrainCheckpoint& cp) {
          Rng eval_rng = Rng(seed).derive(static_cast<std::uint64_t>(1000 + checkpoint_index));
          ++checkpoint_index;
          so.curve.push_back({cp.steps, evaluate_policy(mdp, cp.eval_policy, cfg.eval_episodes, eval_rng)});
        };

        TrainResult result = detail::dispatch_train(agent_name, mdp, cfg, seed, hooks);
        so.record = std::move(result.record);
        so.final_ptilde = result.ptilde;

        std::vector<double> tail;
        for (std::size_t k = so.curve.size() >= 5 ? so.curve.size() - 5 : 0; k < so.curve.size(); ++k) {
          tail.push_back(so.curve[k].mean_return);
        }
        so.final_score = detail::mean_of(tail);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<double> finals;
  for (const SeedOutcome& so : outcome.seeds) finals.push_back(so.final_score);
  outcome.mean_final = detail::mean_of(finals);
  outcome.std_final = detail::std_of(finals);
  return outcome;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

inline void write_seed_csvs(const std::filesystem::path& dir, const AgentOutcome& outcome) {
  for (const SeedOutcome& so : outcome.seeds) {
    std::ostringstream buf;
    so.record.write_csv(buf);
    write_text_file(dir / (outcome.agent + "_seed" + std::to_string(so.seed) + ".csv"), buf.str());
  }
}

inline void write_aggregate_csv(const std::filesystem::path& dir, const AgentOutcome& outcome) {
  std::ostringstream buf;
  buf << "steps,mean_return,std_return,n_seeds\n";
  std::size_t points = outcome.seeds.empty() ? 0 : outcome.seeds[0].curve.size();
  for (std::size_t k = 0; k < points; ++k) {
    std::vector<double> vals;
    for (const SeedOutcome& so : outcome.seeds) {
      if (k < so.curve.size()) vals.push_back(so.curve[k].mean_return);
    }
    buf << outcome.seeds[0].curve[k].steps << "," << format_double(mean_of(vals)) << ","
        << format_double(std_of(vals)) << "," << vals.size() << "\n";
  }
  write_text_file(dir / (outcome.agent + "_aggregate.csv"), buf.str());
}

struct AggregateCurve {
  std::vector<long long> steps;
  std::vector<double> mean;
  std::vector<double> stddev;
};

inline AggregateCurve read_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "steps,mean_return,std_return,n_seeds") {
    throw ConfigError("malformed aggregate csv '" + path.string() + "'");
  }
  AggregateCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4) throw ConfigError("malformed aggregate row in '" + path.string() + "'");
    curve.steps.push_back(parse_ll(f[0]));
    curve.mean.push_back(parse_double(f[1]));
    curve.stddev.push_back(parse_double(f[2]));
  }
  return curve;
}

inline const std::string& agent_color(const std::string& agent) {
  static const std::map<std::string, std::string> colors = {{"asre", "#1f77b4"},
                                                            {"egreedy", "#ff7f0e"},
                                                            {"softq", "#2ca02c"},
                                                            {"prior_penalty", "#d62728"}};
  static const std::string fallback = "#7f7f7f";
  auto it = colors.find(agent);
  return it == colors.end() ? fallback : it->second;
}

inline std::string heat_color(double v) {
  // White to deep blue.
  double clamped = std::min(1.0, std::max(0.0, v));
  int r = static_cast<int>(std::lround(255 + (8 - 255) * clamped));
  int g = static_cast<int>(std::lround(255 + (81 - 255) * clamped));
  int b = static_cast<int>(std::lround(255 + (156 - 255) * clamped));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

// Training curves with a +-1 std band per agent, rebuilt from the aggregate
// CSVs on disk rather than from in-memory state, so the plot always shows
// what was recorded.
inline void emit_training_curves(const std::filesystem::path& dir, const std::vector<std::string>& agents) {
  const int width = 640, height = 400, margin = 50;
  std::vector<detail::AggregateCurve> curves;
  for (const std::string& agent : agents) {
    curves.push_back(detail::read_aggregate_csv(dir / (agent + "_aggregate.csv")));
  }
  long long max_steps = 1;
  double lo = 0.0, hi = 1e-9;
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
      max_steps = std::max(max_steps, c.steps[k]);
      lo = std::min(lo, c.mean[k] - c.stddev[k]);
      hi = std::max(hi, c.mean[k] + c.stddev[k]);
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  SvgWriter svg(width, height);
  auto map_x = [&](double steps) {
    return margin + (width - 2.0 * margin) * steps / static_cast<double>(max_steps);
  };
  auto map_y = [&](double v) { return height - margin - (height - 2.0 * margin) * (v - lo) / (hi - lo); };

  svg.line(margin, height - margin, width - margin, height - margin, "#333333");
  svg.line(margin, margin, margin, height - margin, "#333333");
  svg.text(width / 2.0, height - 12, "environment steps", "middle");
  svg.text(12, margin - 10, "mean evaluation return");

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    if (c.steps.empty()) continue;
    const std::string& color = detail::agent_color(agents[i]);
    std::vector<std::pair<double, double>> band;
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
      band.push_back({map_x(c.steps[k]), map_y(c.mean[k] + c.stddev[k])});
    }
    for (std::size_t k = c.steps.size(); k-- > 0;) {
      band.push_back({map_x(c.steps[k]), map_y(c.mean[k] - c.stddev[k])});
    }
    svg.polygon(band, color, 0.15);
    std::vector<std::pair<double, double>> line;
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
      line.push_back({map_x(c.steps[k]), map_y(c.mean[k])});
    }
    svg.polyline(line, color);
    svg.text(width - margin + 4, margin + 16.0 * i, agents[i], "start", 11);
  }
  detail::write_text_file(dir / "training_curves.svg", svg.str());
}

// Heatmap of the sparsity distribution across training episodes (rows are
// actions, columns are episode bins), read back from a seed CSV.
inline void emit_sparsity_heatmap(const std::filesystem::path& dir, const std::string& agent,
                                  std::uint64_t seed) {
  std::ifstream in(dir / (agent + "_seed" + std::to_string(seed) + ".csv"));
  if (!in) throw ConfigError("cannot read seed csv for heatmap");
  RunRecord record = RunRecord::read_csv(in);
  const int bins = std::min<int>(200, std::max<int>(1, static_cast<int>(record.rows.size())));
  const int cell_w = 3, cell_h = 24, margin = 50;
  const int width = margin * 2 + bins * cell_w;
  const int height = margin * 2 + record.num_actions * cell_h;

  SvgWriter svg(width, height);
  for (int bin = 0; bin < bins; ++bin) {
    std::size_t b0 = record.rows.size() * bin / bins;
    std::size_t b1 = std::max(b0 + 1, record.rows.size() * (bin + 1) / bins);
    std::vector<double> avg(record.num_actions, 0.0);
    for (std::size_t r = b0; r < b1 && r < record.rows.size(); ++r) {
      for (int a = 0; a < record.num_actions; ++a) avg[a] += record.rows[r].ptilde[a];
    }
    for (int a = 0; a < record.num_actions; ++a) {
      avg[a] /= static_cast<double>(b1 - b0);
      svg.rect(margin + bin * cell_w, margin + a * cell_h, cell_w, cell_h, detail::heat_color(avg[a]));
    }
  }
  for (int a = 0; a < record.num_actions; ++a) {
    svg.text(margin - 6, margin + a * cell_h + cell_h * 0.65, "a" + std::to_string(a), "end", 11);
  }
  svg.text(width / 2.0, height - 16, "training episodes", "middle");
  svg.text(width / 2.0, margin - 12, "sparsity distribution over training", "middle");
  detail::write_text_file(dir / "sparsity_heatmap.svg", svg.str());
}

// Per-action executed-fraction lines over training episodes, read back from
// a seed CSV.
inline void emit_exec_frequency(const std::filesystem::path& dir, const std::string& agent,
                                std::uint64_t seed) {
  std::ifstream in(dir / (agent + "_seed" + std::to_string(seed) + ".csv"));
  if (!in) throw ConfigError("cannot read seed csv for frequency plot");
  RunRecord record = RunRecord::read_csv(in);
  const int width = 640, height = 400, margin = 50;
  const int bins = std::min<int>(200, std::max<int>(1, static_cast<int>(record.rows.size())));

  SvgWriter svg(width, height);
  auto map_x = [&](double bin) { return margin + (width - 2.0 * margin) * bin / std::max(1, bins - 1); };
  auto map_y = [&](double v) { return height - margin - (height - 2.0 * margin) * v; };
  svg.line(margin, height - margin, width - margin, height - margin, "#333333");
  svg.line(margin, margin, margin, height - margin, "#333333");
  svg.text(width / 2.0, height - 12, "training episodes", "middle");
  svg.text(12, margin - 10, "executed action fraction");

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  for (int a = 0; a < record.num_actions; ++a) {
    std::vector<std::pair<double, double>> line;
    for (int bin = 0; bin < bins; ++bin) {
      std::size_t b0 = record.rows.size() * bin / bins;
      std::size_t b1 = std::max(b0 + 1, record.rows.size() * (bin + 1) / bins);
      double used = 0.0, steps = 0.0;
      for (std::size_t r = b0; r < b1 && r < record.rows.size(); ++r) {
        for (int other = 0; other < record.num_actions; ++other) {
          steps += static_cast<double>(record.rows[r].executed[other]);
        }
        used += static_cast<double>(record.rows[r].executed[a]);
      }
      line.push_back({map_x(bin), map_y(steps > 0.0 ? used / steps : 0.0)});
    }
    const std::string color = palette[a % 8];
    svg.polyline(line, color);
    svg.text(width - margin + 4, margin + 16.0 * a, "a" + std::to_string(a), "start", 11);
  }
  detail::write_text_file(dir / "exec_frequency.svg", svg.str());
}

struct ExperimentResult {
  std::vector<AgentOutcome> outcomes;
};

// Runs the configured agents end to end: trains every (agent, seed) pair,
// writes per-seed run records, per-agent aggregates, a comparison summary,
// and the three plots.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<std::string>& agents) {
  cfg.validate();
  if (agents.empty()) throw ConfigError("no agents to run");
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output dir '" + cfg.output_dir + "'");

  ExperimentResult result;
  for (const std::string& agent : agents) {
    AgentOutcome outcome = run_agent_experiment(cfg, agent);
    detail::write_seed_csvs(dir, outcome);
    detail::write_aggregate_csv(dir, outcome);
    result.outcomes.push_back(std::move(outcome));
  }

  std::ostringstream cmp;
  cmp << "agent,mean_final,std_final\n";
  for (const AgentOutcome& outcome : result.outcomes) {
    cmp << outcome.agent << "," << detail::format_double(outcome.mean_final) << ","
        << detail::format_double(outcome.std_final) << "\n";
  }
  detail::write_text_file(dir / "comparison.csv", cmp.str());

  emit_training_curves(dir, agents);
  const std::string& plot_agent = agents[0];
  emit_sparsity_heatmap(dir, plot_agent, cfg.seeds[0]);
  emit_exec_frequency(dir, plot_agent, cfg.seeds[0]);
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, {cfg.agent});
}

struct LambdaSweepRow {
  double lambda = 0.0;
  double mean_return = 0.0;
  double std_return = 0.0;
};

// Reruns the full protocol once per regularization weight and writes
// lambda_sweep.csv. Only the asre agent makes sense here.
inline std::vector<LambdaSweepRow> lambda_sweep(const ExperimentConfig& cfg,
                                                const std::vector<double>& lambdas) {
  cfg.validate();
  if (lambdas.empty()) throw ConfigError("lambda sweep needs at least one value");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("lambda sweep values must be positive");
  }
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output dir '" + cfg.output_dir + "'");

  std::vector<LambdaSweepRow> rows;
  for (double l : lambdas) {
    ExperimentConfig sub = cfg;
    sub.agent_config.lambda = l;
    AgentOutcome outcome = run_agent_experiment(sub, "asre");
    rows.push_back({l, outcome.mean_final, outcome.std_final});
  }
  std::ostringstream buf;
  buf << "lambda,mean_return,std_return\n";
  for (const LambdaSweepRow& row : rows) {
    buf << detail::format_double(row.lambda) << "," << detail::format_double(row.mean_return) << ","
        << detail::format_double(row.std_return) << "\n";
  }
  detail::write_text_file(dir / "lambda_sweep.csv", buf.str());
  return rows;
}

}  // namespace asre

#endif  // ASRE_HARNESS_HPP_
