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

#ifndef ASRE_RUN_RECORD_HPP_
#define ASRE_RUN_RECORD_HPP_

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace asre {

namespace detail {

// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("parse_double: bad number '" + s + "'");
  }
  return x;
}

inline long long parse_ll(const std::string& s) {
  long long x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("parse_ll: bad integer '" + s + "'");
  }
  return x;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// One training episode's bookkeeping: per-action counts of what the policy
// asked for versus what executed after budget substitution, plus the
// sparsity distribution and bandit means in force during the episode.
struct RunRecordRow {
  long long episode = 0;
  long long steps = 0;  // cumulative environment steps at episode end
  double undiscounted_return = 0.0;
  std::vector<long long> requested;
  std::vector<long long> executed;
  std::vector<double> ptilde;
  std::vector<double> mu;
  // Kept in the schema for external tooling but always written as zero:
  // emitting real timings would make otherwise identical runs differ.
  long long walltime_ms = 0;
};

struct RunRecord {
  int num_actions = 0;
  std::vector<RunRecordRow> rows;

  static std::string csv_header(int num_actions) {
    std::string h = "episode,steps,return";
    auto block = [&](const char* prefix) {
      for (int a = 0; a < num_actions; ++a) h += "," + std::string(prefix) + std::to_string(a);
    };
    block("req_a");
    block("exec_a");
    block("ptilde_a");
    block("mu_a");
    h += ",walltime_ms";
    return h;
  }

  void write_csv(std::ostream& out) const {
    out << csv_header(num_actions) << "\n";
    for (const RunRecordRow& row : rows) {
      out << row.episode << "," << row.steps << "," << detail::format_double(row.undiscounted_return);
      for (long long v : row.requested) out << "," << v;
      for (long long v : row.executed) out << "," << v;
      for (double v : row.ptilde) out << "," << detail::format_double(v);
      for (double v : row.mu) out << "," << detail::format_double(v);
      out << "," << row.walltime_ms << "\n";
    }
  }

  static RunRecord read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("RunRecord: empty stream");
    // Infer the action count from the header width: 4 blocks of A plus 4
    // fixed columns.
    int total = static_cast<int>(detail::split_csv_line(line).size());
    if (total < 8 || (total - 4) % 4 != 0) throw std::invalid_argument("RunRecord: malformed header");
    int num_actions = (total - 4) / 4;
    if (line != csv_header(num_actions)) throw std::invalid_argument("RunRecord: unexpected header");

    RunRecord record;
    record.num_actions = num_actions;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f = detail::split_csv_line(line);
      if (static_cast<int>(f.size()) != total) throw std::invalid_argument("RunRecord: malformed row");
      RunRecordRow row;
      row.episode = detail::parse_ll(f[0]);
      row.steps = detail::parse_ll(f[1]);
      row.undiscounted_return = detail::parse_double(f[2]);
      int k = 3;
      for (int a = 0; a < num_actions; ++a) row.requested.push_back(detail::parse_ll(f[k++]));
      for (int a = 0; a < num_actions; ++a) row.executed.push_back(detail::parse_ll(f[k++]));
      for (int a = 0; a < num_actions; ++a) row.ptilde.push_back(detail::parse_double(f[k++]));
      for (int a = 0; a < num_actions; ++a) row.mu.push_back(detail::parse_double(f[k++]));
      row.walltime_ms = detail::parse_ll(f[k]);
      record.rows.push_back(std::move(row));
    }
    return record;
  }
};

}  // namespace asre

#endif  // ASRE_RUN_RECORD_HPP_
