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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtvr/engine.hpp"

namespace gtvr {

// A value from the TOML-style config: quoted string, number, boolean, or a
// (possibly nested) array.
struct ConfigValue {
  enum class Kind { String, Number, Bool, Array };
  Kind kind = Kind::String;
  std::string text;  // string contents, number literal, or "true"/"false"
  std::vector<ConfigValue> items;

  std::string describe() const;
};

// Parses one value. With allow_bare, an unquoted word is read as a string
// (command-line overrides such as `network.topology=ring`).
ConfigValue parse_config_value(std::string_view raw, bool allow_bare = false);

// Flat view of a document: `[section]` headers plus `key = value` lines
// become dotted keys ("section.key").
class ConfigDocument {
 public:
  static ConfigDocument parse(std::istream& in, const std::string& source = "<config>");
  static ConfigDocument parse_file(const std::filesystem::path& path);

  // `raw` is parsed with allow_bare.
  void set(const std::string& key, std::string_view raw);
  // Applies GTVR_SECTION__KEY=value variables ("__" separates sections).
  void apply_environment(const std::vector<std::string>& environment);

  const std::map<std::string, ConfigValue>& entries() const { return entries_; }
  const ConfigValue* find(const std::string& key) const;

 private:
  std::map<std::string, ConfigValue> entries_;
};

// Everything the CLI reads from a config document.
struct Settings {
  RunConfig run;
  double sweep_threshold = 1e-10;
  std::vector<std::size_t> speedup_nodes{2, 4, 8};
  double speedup_threshold = 1e-13;
};

// Validates every key against the schema (unknown keys and type mismatches
// raise ConfigError naming the field) and the resulting RunConfig.
Settings to_settings(const ConfigDocument& doc);

const std::vector<std::string>& config_keys();
bool is_config_key(std::string_view key);

// Environment entries of the current process ("NAME=value").
std::vector<std::string> process_environment();

}  // namespace gtvr
