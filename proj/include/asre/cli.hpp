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

#ifndef ASRE_CLI_HPP_
#define ASRE_CLI_HPP_

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asre/config.hpp"
#include "asre/harness.hpp"
#include "asre/verify.hpp"

namespace asre::cli {

// Exit codes: 0 success, 1 failed verification, 2 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;

namespace detail {

inline ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigTree tree = ConfigTree::parse_file(path);
  for (const std::string& assignment : overrides) {
    tree.set_from_string(assignment);
  }
  return ExperimentConfig::from_config(tree);
}

inline std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline void print_outcomes(const ExperimentResult& result, const std::string& output_dir,
                           std::ostream& out) {
  for (const AgentOutcome& outcome : result.outcomes) {
    std::string label = outcome.agent;
    if (label.size() < 14) label += std::string(14 - label.size(), ' ');
    out << label << " final return " << asre::detail::format_double(outcome.mean_final) << " +- "
        << asre::detail::format_double(outcome.std_final) << " over " << outcome.seeds.size()
        << " seed(s)\n";
  }
  out << "outputs written to " << output_dir << "\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Sparse-action reinforcement learning harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string agents_csv;
  std::string lambdas_csv = "0.005,0.01,0.05,0.2";
  std::vector<int> criteria_ids;

  CLI::App* cmd_run = app.add_subcommand("run", "Train one agent per the config and write records + plots");
  cmd_run->add_option("--config", config_path, "Experiment config file")->required();
  cmd_run->add_option("--set", overrides, "Override as section.key=value (repeatable)");

  CLI::App* cmd_compare = app.add_subcommand("compare", "Train several agents on one config side by side");
  cmd_compare->add_option("--config", config_path, "Experiment config file")->required();
  cmd_compare->add_option("--agents", agents_csv, "Comma-separated agent list (default: all four)");
  cmd_compare->add_option("--set", overrides, "Override as section.key=value (repeatable)");

  CLI::App* cmd_sweep = app.add_subcommand("sweep-lambda", "Rerun the agent across regularization weights");
  cmd_sweep->add_option("--config", config_path, "Experiment config file")->required();
  cmd_sweep->add_option("--lambdas", lambdas_csv, "Comma-separated weights");
  cmd_sweep->add_option("--set", overrides, "Override as section.key=value (repeatable)");

  CLI::App* cmd_verify = app.add_subcommand("verify", "Run the numbered acceptance criteria");
  cmd_verify->add_option("--criterion", criteria_ids, "Criterion ids to run (default: all)")
      ->check(CLI::Range(1, 12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    // CLI11 returns 0 for --help; anything else is a usage problem.
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (cmd_run->parsed()) {
      ExperimentConfig cfg = detail::load_config(config_path, overrides);
      ExperimentResult result = run_experiment(cfg);
      detail::print_outcomes(result, cfg.output_dir, std::cout);
      return kExitOk;
    }
    if (cmd_compare->parsed()) {
      ExperimentConfig cfg = detail::load_config(config_path, overrides);
      std::vector<std::string> agents =
          agents_csv.empty() ? known_agents() : detail::split_list(agents_csv);
      ExperimentResult result = run_experiment(cfg, agents);
      detail::print_outcomes(result, cfg.output_dir, std::cout);
      return kExitOk;
    }
    if (cmd_sweep->parsed()) {
      ExperimentConfig cfg = detail::load_config(config_path, overrides);
      std::vector<double> lambdas;
      for (const std::string& item : detail::split_list(lambdas_csv)) {
        lambdas.push_back(asre::detail::parse_double(item));
      }
      std::vector<LambdaSweepRow> rows = lambda_sweep(cfg, lambdas);
      for (const LambdaSweepRow& row : rows) {
        std::cout << "lambda " << asre::detail::format_double(row.lambda) << ": "
                  << asre::detail::format_double(row.mean_return) << " +- "
                  << asre::detail::format_double(row.std_return) << "\n";
      }
      std::cout << "sweep written to " << cfg.output_dir << "/lambda_sweep.csv\n";
      return kExitOk;
    }
    if (cmd_verify->parsed()) {
      std::vector<verify::CriterionResult> results = verify::run_criteria(criteria_ids);
      return verify::print_results(results, std::cout) == 0 ? kExitOk : kExitVerifyFailed;
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace asre::cli

#endif  // ASRE_CLI_HPP_
