// Copyright 2026 The GT-VR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gtvr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>

#include "gtvr/errors.hpp"

extern char** environ;

namespace gtvr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_number(std::string_view s) {
  if (s.empty()) return false;
  std::string_view body = s;
  if (body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  return ec == std::errc() && ptr == body.data() + body.size();
}

class ValueParser {
 public:
  ValueParser(std::string_view text, bool allow_bare) : text_(text), allow_bare_(allow_bare) {}

  ConfigValue parse_all() {
    skip_space();
    ConfigValue v = parse_value();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("cannot parse value '" + std::string(text_) + "': " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  ConfigValue parse_value() {
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return parse_string();
    if (c == '\'') return parse_literal();
    if (c == '[') return parse_array();
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']') ++end;
    const std::string_view token = trim(text_.substr(pos_, end - pos_));
    pos_ = end;
    ConfigValue v;
    if (token == "true" || token == "false") {
      v.kind = ConfigValue::Kind::Bool;
      v.text = std::string(token);
    } else if (is_number(token)) {
      v.kind = ConfigValue::Kind::Number;
      v.text = std::string(token.front() == '+' ? token.substr(1) : token);
    } else if (allow_bare_ && !token.empty()) {
      v.kind = ConfigValue::Kind::String;
      v.text = std::string(token);
    } else {
      fail("expected a quoted string, number, boolean or array");
    }
    return v;
  }

  ConfigValue parse_string() {
    ++pos_;
    ConfigValue v;
    v.kind = ConfigValue::Kind::String;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\' && pos_ < text_.size()) {
        const char e = text_[pos_++];
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      v.text.push_back(c);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  ConfigValue parse_literal() {
    const std::size_t close = text_.find('\'', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated string");
    ConfigValue v;
    v.kind = ConfigValue::Kind::String;
    v.text = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return v;
  }

  ConfigValue parse_array() {
    ++pos_;
    ConfigValue v;
    v.kind = ConfigValue::Kind::Array;
    skip_space();
    while (pos_ < text_.size() && text_[pos_] != ']') {
      v.items.push_back(parse_value());
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        skip_space();
      } else if (pos_ < text_.size() && text_[pos_] != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    if (pos_ >= text_.size()) fail("unterminated array");
    ++pos_;
    return v;
  }

  std::string_view text_;
  bool allow_bare_;
  std::size_t pos_ = 0;
};

// Tracks whether position i is inside a "basic" or 'literal' string.
struct QuoteState {
  char open = 0;
  void feed(std::string_view s, std::size_t i) {
    if (open == 0) {
      if (s[i] == '"' || s[i] == '\'') open = s[i];
    } else if (s[i] == open && (open == '\'' || i == 0 || s[i - 1] != '\\')) {
      open = 0;
    }
  }
};

std::string strip_comment(const std::string& line) {
  QuoteState q;
  for (std::size_t i = 0; i < line.size(); ++i) {
    q.feed(line, i);
    if (line[i] == '#' && q.open == 0) return line.substr(0, i);
  }
  return line;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  QuoteState q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool was_open = q.open != 0;
    q.feed(s, i);
    if (was_open || q.open != 0) continue;
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
  }
  return depth;
}

// ---- typed accessors -----------------------------------------------------

[[noreturn]] void type_error(const std::string& key, const ConfigValue& v, const char* expected) {
  throw ConfigError("config field '" + key + "': expected " + expected + ", got " + v.describe());
}

double as_double(const std::string& key, const ConfigValue& v) {
  if (v.kind != ConfigValue::Kind::Number) type_error(key, v, "a number");
  return std::stod(v.text);
}

std::uint64_t as_uint(const std::string& key, const ConfigValue& v) {
  if (v.kind != ConfigValue::Kind::Number) type_error(key, v, "a non-negative integer");
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
    // Accept integral values written in float notation, e.g. 1e5.
    const double d = std::stod(v.text);
    if (d < 0.0 || std::floor(d) != d || d > 1.8e19) type_error(key, v, "a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }
  return out;
}

bool as_bool(const std::string& key, const ConfigValue& v) {
  if (v.kind != ConfigValue::Kind::Bool) type_error(key, v, "true or false");
  return v.text == "true";
}

std::string as_string(const std::string& key, const ConfigValue& v) {
  if (v.kind != ConfigValue::Kind::String) type_error(key, v, "a string");
  return v.text;
}

template <typename Parse>
auto as_enum(const std::string& key, const ConfigValue& v, Parse&& parse) {
  const std::string text = as_string(key, v);
  try {
    return parse(text);
  } catch (const InvalidArgument& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(Settings&, const std::string&, const ConfigValue&)>;

const std::vector<std::pair<std::string, Setter>>& schema() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"network.topology",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.topology.kind = as_enum(k, v, [](const std::string& t) { return parse_topology_kind(t); });
       }},
      {"network.nodes",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.topology.nodes = as_uint(k, v); }},
      {"network.radius",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.topology.radius = as_double(k, v); }},
      {"network.graph_seed",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.topology.seed = as_uint(k, v); }},
      {"network.weights",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.weights = as_enum(k, v, [](const std::string& t) { return parse_weight_rule(t); });
       }},
      {"network.edges",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         if (v.kind != ConfigValue::Kind::Array) type_error(k, v, "an array of [sender, receiver] pairs");
         s.run.topology.edges.clear();
         for (const auto& e : v.items) {
           if (e.kind != ConfigValue::Kind::Array || e.items.size() != 2) {
             type_error(k, e, "a [sender, receiver] pair");
           }
           s.run.topology.edges.emplace_back(as_uint(k, e.items[0]), as_uint(k, e.items[1]));
         }
       }},
      {"algorithm.kind",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.algorithm.kind = as_enum(k, v, [](const std::string& t) { return parse_algorithm_kind(t); });
       }},
      {"algorithm.alpha",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         if (v.kind == ConfigValue::Kind::String && v.text == "theory") {
           s.run.algorithm.alpha.reset();
         } else {
           if (v.kind != ConfigValue::Kind::Number) type_error(k, v, "a number or \"theory\"");
           s.run.algorithm.alpha = as_double(k, v);
         }
       }},
      {"algorithm.inner_loop",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         if (v.kind == ConfigValue::Kind::String && v.text == "theory") {
           s.run.algorithm.inner_loop.reset();
         } else {
           if (v.kind != ConfigValue::Kind::Number) type_error(k, v, "an integer or \"theory\"");
           s.run.algorithm.inner_loop = as_uint(k, v);
         }
       }},
      {"objective.type",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         const std::string t = as_string(k, v);
         if (t == "logistic") {
           s.run.objective.type = ObjectiveType::Logistic;
         } else if (t == "quadratic") {
           s.run.objective.type = ObjectiveType::Quadratic;
         } else {
           throw ConfigError("config field '" + k + "': unknown objective '" + t + "'");
         }
       }},
      {"objective.lambda",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.lambda = as_double(k, v); }},
      {"objective.dataset",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.dataset = as_string(k, v); }},
      {"objective.test_dataset",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.test_dataset = as_string(k, v);
       }},
      {"objective.dimension",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.dimension = as_uint(k, v); }},
      {"objective.normalize",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.normalize = as_bool(k, v); }},
      {"synthetic.samples",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.synthetic.samples = as_uint(k, v);
       }},
      {"synthetic.dimension",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.synthetic.dimension = as_uint(k, v);
       }},
      {"synthetic.separation",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.synthetic.separation = as_double(k, v);
       }},
      {"synthetic.seed",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.synthetic.seed = as_uint(k, v); }},
      {"synthetic.test_samples",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.synthetic.test_samples = as_uint(k, v);
       }},
      {"quadratic.components",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.quadratic.components = as_uint(k, v);
       }},
      {"quadratic.dimension",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.quadratic.dimension = as_uint(k, v);
       }},
      {"quadratic.spread",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         s.run.objective.quadratic.spread = as_double(k, v);
       }},
      {"quadratic.noise",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.quadratic.noise = as_double(k, v); }},
      {"quadratic.seed",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.objective.quadratic.seed = as_uint(k, v); }},
      {"partition.mode",
       [](Settings&, const std::string& k, const ConfigValue& v) {
         const std::string t = as_string(k, v);
         if (t != "even" && t != "proportions") {
           throw ConfigError("config field '" + k + "': expected \"even\" or \"proportions\"");
         }
       }},
      {"partition.proportions",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         if (v.kind != ConfigValue::Kind::Array) type_error(k, v, "an array of numbers");
         s.run.partition.proportions.clear();
         for (const auto& item : v.items) s.run.partition.proportions.push_back(as_double(k, item));
       }},
      {"partition.shuffle_seed",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.partition.shuffle_seed = as_uint(k, v); }},
      {"run.iterations",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.iterations = as_uint(k, v); }},
      {"run.target_gap",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.target_gap = as_double(k, v); }},
      {"run.seed", [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.seed = as_uint(k, v); }},
      {"run.metrics_every",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.metrics_every = as_uint(k, v); }},
      {"run.jobs", [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.jobs = as_uint(k, v); }},
      {"run.label", [](Settings& s, const std::string& k, const ConfigValue& v) { s.run.label = as_string(k, v); }},
      {"sweep.threshold",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.sweep_threshold = as_double(k, v); }},
      {"speedup.nodes",
       [](Settings& s, const std::string& k, const ConfigValue& v) {
         if (v.kind != ConfigValue::Kind::Array) type_error(k, v, "an array of node counts");
         s.speedup_nodes.clear();
         for (const auto& item : v.items) s.speedup_nodes.push_back(as_uint(k, item));
       }},
      {"speedup.threshold",
       [](Settings& s, const std::string& k, const ConfigValue& v) { s.speedup_threshold = as_double(k, v); }},
  };
  return table;
}

}  // namespace

std::string ConfigValue::describe() const {
  switch (kind) {
    case Kind::String: return "string \"" + text + "\"";
    case Kind::Number: return "number " + text;
    case Kind::Bool: return "boolean " + text;
    case Kind::Array: return "array of " + std::to_string(items.size());
  }
  return "value";
}

ConfigValue parse_config_value(std::string_view raw, bool allow_bare) {
  return ValueParser(trim(raw), allow_bare).parse_all();
}

ConfigDocument ConfigDocument::parse(std::istream& in, const std::string& source) {
  ConfigDocument doc;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = strip_comment(line);
    std::string_view view = trim(text);
    if (view.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (view.front() == '[') {
      if (view.back() != ']' || view.size() < 3) throw ConfigError(where + ": malformed section header");
      section = std::string(trim(view.substr(1, view.size() - 2)));
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = std::string(trim(view.substr(0, eq)));
    std::string value = std::string(trim(view.substr(eq + 1)));
    while (bracket_balance(value) > 0 && std::getline(in, line)) {
      ++line_no;
      value += ' ';
      value += strip_comment(line);
    }
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      doc.entries_[full] = parse_config_value(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": field '" + full + "': " + e.what());
    }
  }
  return doc;
}

ConfigDocument ConfigDocument::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse(in, path.string());
}

void ConfigDocument::set(const std::string& key, std::string_view raw) {
  try {
    entries_[key] = parse_config_value(raw, true);
  } catch (const ConfigError& e) {
    throw ConfigError("override '" + key + "': " + e.what());
  }
}

void ConfigDocument::apply_environment(const std::vector<std::string>& environment) {
  static constexpr std::string_view prefix = "GTVR_";
  for (const auto& entry : environment) {
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(prefix.size(), eq - prefix.size());
    std::string key;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_') {
        key += '.';
        ++i;
      } else {
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
      }
    }
    set(key, std::string_view(entry).substr(eq + 1));
  }
}

const ConfigValue* ConfigDocument::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

Settings to_settings(const ConfigDocument& doc) {
  Settings settings;
  const auto& table = schema();
  for (const auto& [key, value] : doc.entries()) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError("unknown config field '" + key + "'");
    it->second(settings, key, value);
  }
  if (const ConfigValue* mode = doc.find("partition.mode");
      mode != nullptr && mode->text == "proportions" && settings.run.partition.proportions.empty()) {
    throw ConfigError("config field 'partition.proportions' is required when partition.mode = \"proportions\"");
  }
  if (const ConfigValue* mode = doc.find("partition.mode"); mode != nullptr && mode->text == "even") {
    settings.run.partition.proportions.clear();
  }
  if (!(settings.sweep_threshold > 0.0)) throw ConfigError("config field 'sweep.threshold' must be > 0");
  if (!(settings.speedup_threshold > 0.0)) throw ConfigError("config field 'speedup.threshold' must be > 0");
  settings.run.validate();
  return settings;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : schema()) k.push_back(e.first);
    return k;
  }();
  return keys;
}

bool is_config_key(std::string_view key) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::vector<std::string> process_environment() {
  std::vector<std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) env.emplace_back(*e);
  return env;
}

}  // namespace gtvr
