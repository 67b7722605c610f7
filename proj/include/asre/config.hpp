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

#ifndef ASRE_CONFIG_HPP_
#define ASRE_CONFIG_HPP_

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asre/mdp.hpp"
#include "asre/run_record.hpp"

namespace asre {

// Raised for any malformed or ill-typed configuration input. The CLI maps it
// to its configuration-error exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One typed value: number, string, boolean, or a homogeneous list.
struct ConfigValue {
  enum class Kind { kNumber, kString, kBool, kNumberList, kStringList };
  Kind kind = Kind::kNumber;
  double number = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<double> numbers;
  std::vector<std::string> strings;

  static ConfigValue make_number(double x) {
    ConfigValue v;
    v.kind = Kind::kNumber;
    v.number = x;
    return v;
  }
  static ConfigValue make_string(std::string s) {
    ConfigValue v;
    v.kind = Kind::kString;
    v.str = std::move(s);
    return v;
  }
  static ConfigValue make_bool(bool b) {
    ConfigValue v;
    v.kind = Kind::kBool;
    v.boolean = b;
    return v;
  }
  static ConfigValue make_numbers(std::vector<double> xs) {
    ConfigValue v;
    v.kind = Kind::kNumberList;
    v.numbers = std::move(xs);
    return v;
  }
  static ConfigValue make_strings(std::vector<std::string> ss) {
    ConfigValue v;
    v.kind = Kind::kStringList;
    v.strings = std::move(ss);
    return v;
  }

  double as_number() const {
    if (kind != Kind::kNumber) throw ConfigError("expected a number");
    return number;
  }
  long long as_int() const {
    double x = as_number();
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9) throw ConfigError("expected an integer");
    return static_cast<long long>(r);
  }
  const std::string& as_string() const {
    if (kind != Kind::kString) throw ConfigError("expected a string");
    return str;
  }
  bool as_bool() const {
    if (kind != Kind::kBool) throw ConfigError("expected a boolean");
    return boolean;
  }
  const std::vector<double>& as_numbers() const {
    if (kind != Kind::kNumberList) throw ConfigError("expected a number list");
    return numbers;
  }
  const std::vector<std::string>& as_strings() const {
    if (kind != Kind::kStringList) throw ConfigError("expected a string list");
    return strings;
  }
  std::vector<long long> as_ints() const {
    std::vector<long long> out;
    for (double x : as_numbers()) {
      double r = std::round(x);
      if (std::abs(x - r) > 1e-9) throw ConfigError("expected an integer list");
      out.push_back(static_cast<long long>(r));
    }
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment, respecting quoted strings.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline std::string parse_quoted(const std::string& raw, const std::string& where) {
  if (raw.size() < 2 || raw.back() != '"') throw ConfigError(where + ": unterminated string");
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\') {
      ++i;
      if (i + 1 >= raw.size() + 1 || (raw[i] != '"' && raw[i] != '\\')) {
        throw ConfigError(where + ": bad escape in string");
      }
      out += raw[i];
    } else if (raw[i] == '"') {
      throw ConfigError(where + ": stray quote in string");
    } else {
      out += raw[i];
    }
  }
  return out;
}

inline bool try_parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// `lenient` lets a bare word through as a string; file parsing keeps it off
// so unquoted typos fail instead of becoming strings.
inline ConfigValue parse_value(const std::string& raw_in, const std::string& where, bool lenient) {
  std::string raw = trim(raw_in);
  if (raw.empty()) throw ConfigError(where + ": missing value");
  if (raw.front() == '"') return ConfigValue::make_string(parse_quoted(raw, where));
  if (raw == "true") return ConfigValue::make_bool(true);
  if (raw == "false") return ConfigValue::make_bool(false);
  if (raw.front() == '[') {
    if (raw.back() != ']') throw ConfigError(where + ": unterminated list");
    std::string body = raw.substr(1, raw.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    bool in_string = false;
    for (char ch : body) {
      if (ch == '"') in_string = !in_string;
      if (ch == ',' && !in_string) {
        items.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!trim(cur).empty() || !items.empty()) items.push_back(cur);
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const std::string& item : items) {
      std::string t = trim(item);
      if (t.empty()) throw ConfigError(where + ": empty list element");
      double x = 0.0;
      if (!t.empty() && t.front() == '"') {
        strs.push_back(parse_quoted(t, where));
      } else if (try_parse_number(t, x)) {
        nums.push_back(x);
      } else {
        throw ConfigError(where + ": bad list element '" + t + "'");
      }
    }
    if (!nums.empty() && !strs.empty()) throw ConfigError(where + ": mixed list types");
    if (!strs.empty()) return ConfigValue::make_strings(std::move(strs));
    return ConfigValue::make_numbers(std::move(nums));
  }
  double x = 0.0;
  if (try_parse_number(raw, x)) return ConfigValue::make_number(x);
  if (lenient) return ConfigValue::make_string(raw);
  throw ConfigError(where + ": cannot parse value '" + raw + "' (strings need quotes)");
}

inline std::string serialize_value(const ConfigValue& v) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + "\"";
  };
  switch (v.kind) {
    case ConfigValue::Kind::kNumber:
      return format_double(v.number);
    case ConfigValue::Kind::kString:
      return quote(v.str);
    case ConfigValue::Kind::kBool:
      return v.boolean ? "true" : "false";
    case ConfigValue::Kind::kNumberList: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.numbers.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v.numbers[i]);
      }
      return out + "]";
    }
    case ConfigValue::Kind::kStringList: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.strings.size(); ++i) {
        if (i) out += ", ";
        out += quote(v.strings[i]);
      }
      return out + "]";
    }
  }
  throw ConfigError("serialize_value: bad kind");
}

}  // namespace detail

// Sectioned key/value configuration: [section] headers, key = value lines,
// '#' comments. Values are numbers, quoted strings, booleans, or homogeneous
// lists of numbers or strings. Keys sort deterministically on output, so
// serialize-parse round-trips are stable.
class ConfigTree {
 public:
  static ConfigTree parse(const std::string& text) {
    ConfigTree tree;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string where = "line " + std::to_string(line_no);
      std::string body = detail::trim(detail::strip_comment(line));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
        section = detail::trim(body.substr(1, body.size() - 2));
        if (section.empty()) throw ConfigError(where + ": empty section name");
        tree.sections_[section];
        continue;
      }
      std::size_t eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
      std::string key = detail::trim(body.substr(0, eq));
      if (key.empty()) throw ConfigError(where + ": empty key");
      if (section.empty()) throw ConfigError(where + ": key outside any [section]");
      tree.sections_[section][key] = detail::parse_value(body.substr(eq + 1), where, /*lenient=*/false);
    }
    return tree;
  }

  static ConfigTree parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  const ConfigValue* find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const ConfigValue& at(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) throw ConfigError("missing key '" + section + "." + key + "'");
    return *v;
  }

  double number_or(const std::string& section, const std::string& key, double fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_number() : fallback;
  }
  long long int_or(const std::string& section, const std::string& key, long long fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_int() : fallback;
  }
  bool bool_or(const std::string& section, const std::string& key, bool fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_bool() : fallback;
  }
  std::string string_or(const std::string& section, const std::string& key, std::string fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->as_string() : fallback;
  }

  void set(const std::string& section, const std::string& key, ConfigValue value) {
    sections_[section][key] = std::move(value);
  }

  // Applies one "section.key=value" override, as given on a command line.
  // Values parse with the file grammar, except a bare word falls back to a
  // string for convenience.
  void set_from_string(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' needs key=value");
    std::string path = detail::trim(assignment.substr(0, eq));
    std::size_t dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= path.size()) {
      throw ConfigError("override key '" + path + "' must be section.key");
    }
    sections_[path.substr(0, dot)][path.substr(dot + 1)] =
        detail::parse_value(assignment.substr(eq + 1), "override '" + assignment + "'", /*lenient=*/true);
  }

  const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const { return sections_; }

  std::string serialize() const {
    std::string out;
    for (const auto& [section, keys] : sections_) {
      out += "[" + section + "]\n";
      for (const auto& [key, value] : keys) {
        out += key + " = " + detail::serialize_value(value) + "\n";
      }
      out += "\n";
    }
    return out;
  }

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

// Full tensor dump of an instance into an [mdp] section, and back. Doubles
// serialize to shortest round-trip form, so from(to(m)) reproduces m exactly.
inline ConfigTree mdp_to_config(const SparseActionMdp& mdp) {
  ConfigTree tree;
  tree.set("mdp", "num_states", ConfigValue::make_number(mdp.num_states));
  tree.set("mdp", "num_actions", ConfigValue::make_number(mdp.num_actions));
  tree.set("mdp", "discount", ConfigValue::make_number(mdp.discount));
  tree.set("mdp", "horizon", ConfigValue::make_number(mdp.horizon));
  tree.set("mdp", "noop_action", ConfigValue::make_number(mdp.noop_action));
  tree.set("mdp", "transition", ConfigValue::make_numbers(mdp.transition));
  tree.set("mdp", "reward", ConfigValue::make_numbers(mdp.reward.data()));
  tree.set("mdp", "initial_dist", ConfigValue::make_numbers(mdp.initial_dist));
  std::vector<double> budgets(mdp.budgets.begin(), mdp.budgets.end());
  tree.set("mdp", "budgets", ConfigValue::make_numbers(budgets));
  std::vector<double> terminal(mdp.terminal.begin(), mdp.terminal.end());
  tree.set("mdp", "terminal", ConfigValue::make_numbers(terminal));
  return tree;
}

inline SparseActionMdp mdp_from_config(const ConfigTree& tree) {
  SparseActionMdp mdp;
  mdp.num_states = static_cast<int>(tree.at("mdp", "num_states").as_int());
  mdp.num_actions = static_cast<int>(tree.at("mdp", "num_actions").as_int());
  mdp.discount = tree.at("mdp", "discount").as_number();
  mdp.horizon = static_cast<int>(tree.at("mdp", "horizon").as_int());
  mdp.noop_action = static_cast<int>(tree.at("mdp", "noop_action").as_int());
  mdp.transition = tree.at("mdp", "transition").as_numbers();
  const std::vector<double>& reward = tree.at("mdp", "reward").as_numbers();
  if (static_cast<int>(reward.size()) != mdp.num_states * mdp.num_actions) {
    throw ConfigError("mdp_from_config: reward has wrong size");
  }
  mdp.reward = Matrix(mdp.num_states, mdp.num_actions);
  mdp.reward.data() = reward;
  mdp.initial_dist = tree.at("mdp", "initial_dist").as_numbers();
  for (long long b : tree.at("mdp", "budgets").as_ints()) mdp.budgets.push_back(b);
  for (long long t : tree.at("mdp", "terminal").as_ints()) {
    mdp.terminal.push_back(static_cast<std::uint8_t>(t != 0));
  }
  try {
    mdp.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("mdp_from_config: ") + err.what());
  }
  return mdp;
}

}  // namespace asre

#endif  // ASRE_CONFIG_HPP_
